//! Driving the harness from code: build a configuration, apply overrides and
//! run a sweep into a temporary directory.

use rotor_channels::harness::{commands, RunConfig};

fn main() -> rotor_channels::Result<()> {
    let out = std::env::temp_dir().join("rotor-run-config");
    let cfg = RunConfig::from_toml_str(
        "[system]\nkind = \"classical\"\nM = 12\nalpha1 = 0.0\nb = 0.5\n\n[solver]\nbackend = \"krylov\"\n",
        &["task.alphas=[0.0, 1.0, 2.0]".into(), format!("output.dir={:?}", out.display().to_string())],
    )?;
    let r = commands::sweep(&cfg)?;
    println!("{:?} -> {}", r.outcome, r.run_dir.display());
    print!("{}", std::fs::read_to_string(r.run_dir.join("sweep.csv"))?);
    Ok(())
}

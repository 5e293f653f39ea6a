use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rotor-channels"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_dir(out: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8_lossy(&out.stdout).lines().last().expect("run directory printed").trim())
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = run(&["spectrum", "--out", out, "--set", "system.N=7"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("system.N"));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[system]\nkind = \"quantum\"\nNN = 8\n").unwrap();
    let r = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("NN"));

    let r = run(&["sweep", "--out", out, "--set", "system.N=8"]);
    assert_eq!(r.status.code(), Some(2), "empty alpha grid");
    assert_eq!(run(&["spectrum", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--only", "99", "--out", out]).status.code(), Some(2));
    let r = run(&["modes", "--out", out, "--set", "system.N=8", "--set", "task.modes=[500]", "--set", "grid.G=16"]);
    assert_eq!(r.status.code(), Some(2), "mode index out of range");
}

#[test]
fn solver_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let common = ["--out", out, "--set", "system.N=20", "--set", "solver.backend=krylov", "--set", "solver.tol=1e-300", "--set", "solver.max_restarts=1"];
    let mut args = vec!["spectrum"];
    args.extend(common);
    assert_eq!(run(&args).status.code(), Some(3));

    let mut args = vec!["sweep", "--set", "task.alphas=[1.0, 2.0]"];
    args.extend(common);
    let r = run(&args);
    assert_eq!(r.status.code(), Some(3));
    let csv = read(&run_dir(&r).join("sweep.csv"));
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.contains("solver failed")), "{csv}");
}

#[test]
fn spectrum_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["spectrum", "--out", dir.path().to_str().unwrap(), "--set", "system.N=8", "--set", "output.operator=true"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let d = run_dir(&r);
    let csv = read(&d.join("eigenvalues.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("run_id,index,re,im,modulus,real_flag,pair_index"));
    let trivial: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!((trivial[1], trivial[5]), ("0", "true"));
    assert!((trivial[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(csv.lines().count(), 1 + 64);
    assert!(read(&d.join("radii.csv")).starts_with("N,b,r_in,r_out,ep,ep_bessel\n8,"));

    let m: serde_json::Value = serde_json::from_str(&read(&d.join("manifest.json"))).unwrap();
    let files = m["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["path"].as_str().unwrap()).collect();
    assert_eq!(names, ["channel.bin", "eigenvalues.csv", "radii.csv", "summary.json"]);
    for f in files {
        let bytes = std::fs::read(d.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), rotor_channels::io::sha256_hex(&bytes));
    }
    let (h, op) = rotor_channels::io::container::read_operator(&d.join("channel.bin")).unwrap();
    assert_eq!(h.shape, [64, 64]);
    assert_eq!(op.nrows(), 64);
}

#[test]
fn b_zero_spectrum_is_unimodular() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["spectrum", "--out", dir.path().to_str().unwrap(), "--set", "system.N=10", "--set", "system.b=0"]);
    assert_eq!(r.status.code(), Some(0));
    let rows: Vec<rotor_channels::io::tables::EigenvalueRow> =
        rotor_channels::io::tables::read_csv(&run_dir(&r).join("eigenvalues.csv")).unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|x| (x.modulus - 1.0).abs() < 1e-10));
}

#[test]
fn other_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let small = ["--out", out, "--set", "system.N=10", "--set", "system.M=4", "--set", "grid.G=24"];
    for (cmd, file) in [
        ("ftse", "ftse.pgm"),
        ("radii", "radii.csv"),
        ("submatrix", "submatrix_eigenvalues.csv"),
        ("correlations", "correlations.csv"),
        ("modes", "mode_001.pgm.json"),
    ] {
        let mut args = vec![cmd];
        args.extend(small);
        let r = run(&args);
        assert_eq!(r.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&r.stderr));
        assert!(run_dir(&r).join(file).exists(), "{cmd}");
        assert!(run_dir(&r).join("manifest.json").exists(), "{cmd}");
    }
    let mut args = vec!["correlations", "--set", "system.kind=\"classical\""];
    args.extend(small);
    let r = run(&args);
    let csv = read(&run_dir(&r).join("correlations.csv"));
    assert!(csv.starts_with("t,re,im,abs\n0,1.0,0.0,1.0\n"), "{csv}");
}

#[test]
fn corrupted_golden_fails_verify() {
    let dir = tempfile::tempdir().unwrap();
    let golden = read(&rotor_channels::verify::default_golden_path());
    let bad = dir.path().join("hashes.json");
    let first_hash = golden.split('"').nth(3).unwrap().to_string();
    std::fs::write(&bad, golden.replace(&first_hash, &"0".repeat(64))).unwrap();
    let out = dir.path().to_str().unwrap();

    let r = run(&["verify", "--only", "golden", "--golden", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(4));
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.lines().any(|l| l.starts_with("[FAIL] golden")), "{text}");
    let v: serde_json::Value = serde_json::from_str(&read(&run_dir(&r).join("verdicts.json"))).unwrap();
    assert_eq!(v["verdicts"][0]["status"], "FAIL");

    let r = run(&["verify", "--only", "golden", "--only", "3", "--out", out]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
}

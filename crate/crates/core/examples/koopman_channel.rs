//! Truncated Koopman channel: matrix elements, a Monte Carlo check against the
//! noisy map, correlations and the COO export.

use rotor_channels::io::coo::{read_coo, write_koopman_coo};
use rotor_channels::koopman::oracle::{stochastic_step_oracle, NoisePlacement};
use rotor_channels::koopman::KoopmanChannel;

fn main() -> rotor_channels::Result<()> {
    let (alpha, b) = (2.0, 0.5);
    let k = KoopmanChannel::build(8, alpha, b)?;
    println!("dimension {}, nonzeros {}", k.dimension(), k.nnz());

    let (mode, target) = ((1, 0), (0, 1));
    let exact = k.get(k.index(target.0, target.1).unwrap(), k.index(mode.0, mode.1).unwrap());
    let est = stochastic_step_oracle(alpha, b, mode, target, 300, 1, NoisePlacement::AfterLocalStep);
    println!("<(0,1)|K|(1,0)> = {exact:.6}, noisy-map estimate {:.6} +- {:.1e}", est.mean.re, est.sigma());

    let f = k.fourier_mode(1, 0)?;
    for (t, c) in k.correlation(&f, &f, 5).iter().enumerate() {
        println!("  <f|K^{t}|f> = {:.6}", c);
    }

    let path = std::env::temp_dir().join("koopman_m8.coo");
    write_koopman_coo(&k, &path)?;
    let (header, entries) = read_coo(&path)?;
    println!("wrote {} ({} entries, M = {})", path.display(), entries.len(), header.m);
    Ok(())
}

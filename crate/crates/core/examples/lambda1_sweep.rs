//! Largest non-trivial eigenvalue of the classical channel against the kick strength.

use rotor_channels::spectral::sweep::{lambda1_sweep, Backend, ChannelKind};
use rotor_channels::spectral::KrylovOptions;

fn main() -> rotor_channels::Result<()> {
    let alphas: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    let s = lambda1_sweep(&alphas, 0.1, 20, ChannelKind::Classical, Backend::Krylov, &KrylovOptions::default())?;
    for x in &s.samples {
        let bar = "#".repeat((x.lambda1_abs * 50.0).round().max(0.0) as usize);
        println!("{:5.1} {:.6} {bar}", x.alpha, x.lambda1_abs);
    }
    Ok(())
}

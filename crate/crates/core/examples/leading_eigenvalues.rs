//! Leading eigenvalues of the classical and quantum channels side by side.

use rotor_channels::spectral::sweep::{leading_spectrum, Backend, ChannelKind};
use rotor_channels::spectral::{nearest_match, KrylovOptions};
use rotor_channels::SystemParams;

fn main() -> rotor_channels::Result<()> {
    let p = SystemParams::new(2.0, 2.0, 0.1)?;
    let opts = KrylovOptions::default();
    let cl = leading_spectrum(ChannelKind::Classical, 30, &p, Backend::Krylov, 6, &opts)?;
    let qu = leading_spectrum(ChannelKind::Quantum, 40, &p, Backend::Krylov, 10, &opts)?;
    println!("{:>26} {:>26} {:>9}", "classical M=30", "quantum N=40", "distance");
    for (c, q, d) in nearest_match(&cl.nontrivial_values(), &qu.nontrivial_values()) {
        println!("{:>26.6} {:>26.6} {:>9.2e}", c, q, d);
    }
    Ok(())
}

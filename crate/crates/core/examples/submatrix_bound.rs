//! The Hermitian submatrix in the uncoupled eigenbasis and its bound on |lambda_1|.

use rotor_channels::quantum::submatrix::build_submatrix;
use rotor_channels::spectral::sweep::{leading_spectrum, Backend, ChannelKind};
use rotor_channels::spectral::KrylovOptions;
use rotor_channels::SystemParams;

fn main() -> rotor_channels::Result<()> {
    let (n, b) = (30, 0.1);
    println!("alpha  lambda_max(M_S)  |lambda_1|");
    for alpha in [0.0, 2.0, 5.0, 8.5] {
        let s = build_submatrix(n, alpha, b)?;
        let p = SystemParams::new(alpha, alpha, b)?;
        let l1 = leading_spectrum(ChannelKind::Quantum, n, &p, Backend::Krylov, 4, &KrylovOptions::default())?.lambda1().unwrap();
        println!("{alpha:5.1}  {:15.6}  {:10.6}", s.top_nontrivial()?, l1.norm());
    }
    Ok(())
}

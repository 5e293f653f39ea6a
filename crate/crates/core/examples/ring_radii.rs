//! Entangling power, single-ring radii and how many eigenvalues fall inside
//! the predicted annulus.

use rotor_channels::quantum::FactoredChannel;
use rotor_channels::spectral::entangle::{coupled_entangling_power, ep_bessel_asymptotic};
use rotor_channels::spectral::rings::{annulus_occupancy, ring_radii_factored};
use rotor_channels::spectral::{factored_spectrum, ModeRequest};
use rotor_channels::SystemParams;

fn main() -> rotor_channels::Result<()> {
    let (n, b) = (30, 0.1);
    let ep = coupled_entangling_power(n, b);
    let bes = ep_bessel_asymptotic(n, b)?;
    println!("e_p = {ep:.6}, Bessel form {:.6}", bes.value);

    let f = FactoredChannel::build(n, &SystemParams::new(6.0, 6.0, b)?)?;
    let r = ring_radii_factored(&f);
    println!("r_o = {:.4} (sqrt(1 - e_p) = {:.4}), r_in = {:.4}", r.r_o, (1.0 - ep).sqrt(), r.r_in);
    let spec = factored_spectrum(&f, ModeRequest::None)?;
    let occ = annulus_occupancy(&spec.nontrivial_values(), &r, 0.02);
    println!("{:.1}% of {} non-trivial eigenvalues in the padded annulus", 100.0 * occ, spec.pairs.len() - 1);
    Ok(())
}

//! Orbits of the standard map and of the coupled map, and the FTSE at a few
//! points of phase space.

use rotor_channels::classical::{coupled_map_step, ftse, standard_map_step, DEFAULT_FTSE_STEPS};
use rotor_channels::SystemParams;

fn main() -> rotor_channels::Result<()> {
    let (mut q, mut p) = (0.1, 0.2);
    println!("standard map, alpha = 1.0");
    for t in 0..5 {
        println!("  t={t}  q={q:.6}  p={p:.6}");
        (q, p) = standard_map_step(1.0, q, p);
    }

    let params = SystemParams::new(2.0, 2.0, 0.1)?;
    let mut s = [0.1, 0.2, 0.7, 0.4];
    println!("coupled map, alpha = 2.0, b = 0.1");
    for t in 0..3 {
        println!("  t={t}  {:.6?}", s);
        s = coupled_map_step(&params, s);
    }

    let t = DEFAULT_FTSE_STEPS;
    for alpha in [3.9, 4.1, 6.0] {
        println!("ftse at the origin, alpha = {alpha}: {:.4}", ftse(alpha, 0.0, 0.0, t)?);
    }
    Ok(())
}

//! Husimi picture of the leading quantum mode, written as a PNG with a
//! viridis colormap next to the FTSE field of the same map.

use rotor_channels::classical::ftse_grid;
use rotor_channels::phase_space::{husimi_mode, render_field, Colormap, RasterFormat};
use rotor_channels::quantum::FactoredChannel;
use rotor_channels::spectral::{top_k, KrylovOptions};
use rotor_channels::SystemParams;

fn main() -> rotor_channels::Result<()> {
    let (n, g) = (60, 120);
    let f = FactoredChannel::build(n, &SystemParams::new(2.0, 2.0, 0.1)?)?;
    let spec = top_k(&f, 2, Some(&f.trivial_mode()), &KrylovOptions::default())?;
    let l1 = spec.nontrivial().next().unwrap();
    let h = husimi_mode(l1.right.as_ref().unwrap(), g)?;
    println!("lambda_1 = {:.6}; {:.1}% of the weight within 0.15 of the origin", l1.value, 100.0 * h.mass_within(0.0, 0.0, 0.15));

    let dir = std::env::temp_dir();
    let info = render_field(&h, &dir.join("husimi_l1.png"), RasterFormat::Png, Colormap::Viridis, None)?;
    println!("husimi_l1.png scaled over [{:.3e}, {:.3e}]", info.min, info.max);
    render_field(&ftse_grid(2.0, g, 8)?, &dir.join("ftse_a2.png"), RasterFormat::Png, Colormap::Viridis, None)?;
    println!("wrote rasters to {}", dir.display());
    Ok(())
}

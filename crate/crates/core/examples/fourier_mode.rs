//! Leading eigenmode of the Koopman channel reconstructed on phase space.

use rotor_channels::koopman::KoopmanChannel;
use rotor_channels::phase_space::{fourier_mode_field, render_field, Colormap, RasterFormat};
use rotor_channels::spectral::{top_k, KrylovOptions};

fn main() -> rotor_channels::Result<()> {
    let k = KoopmanChannel::build(20, 2.0, 0.1)?;
    let spec = top_k(&k, 2, Some(&k.trivial_mode()), &KrylovOptions::default())?;
    let l1 = spec.nontrivial().next().unwrap();
    let field = fourier_mode_field(&k, l1.right.as_ref().unwrap(), 96)?;
    println!("lambda_1 = {:.6}; {:.1}% of |f|^2 within 0.15 of the origin", l1.value, 100.0 * field.mass_within(0.0, 0.0, 0.15));
    let path = std::env::temp_dir().join("koopman_l1.pgm");
    render_field(&field, &path, RasterFormat::Pgm, Colormap::Gray, None)?;
    println!("wrote {}", path.display());
    Ok(())
}

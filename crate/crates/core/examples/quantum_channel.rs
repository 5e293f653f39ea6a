//! The quantum channel of the coupled kicked rotors: realignment build,
//! factored build, Kraus form and the CPTP diagnostics.

use rotor_channels::quantum::channel::channel_from_unitary;
use rotor_channels::quantum::cptp::{cptp_report, kraus_operators};
use rotor_channels::quantum::{coupled_unitary, FactoredChannel};
use faer::Mat;
use rotor_channels::{SystemParams, C64};

fn main() -> rotor_channels::Result<()> {
    let n = 12;
    let params = SystemParams::new(2.0, 3.0, 0.4)?;
    let u = coupled_unitary(n, &params)?;
    println!("unitarity defect of U: {:.1e}", u.unitarity_defect());

    let m = channel_from_unitary(&u)?;
    let fast = FactoredChannel::build(n, &params)?.to_dense()?;
    println!("realigned vs factored channel: {:.1e}", m.max_abs_diff(&fast));

    let kraus = kraus_operators(&u)?;
    let r = cptp_report(&m, Some(&kraus))?;
    println!("{} Kraus operators", kraus.len());
    println!("Choi min eigenvalue {:.2e}", r.choi_min_eigenvalue);
    println!("unitality residual  {:.2e}", r.unitality_residual);
    println!("Kraus completeness  {:.2e}", r.kraus_completeness.unwrap());

    // Autocorrelation of the clock operator exp(2 pi i q), normalised to Tr(a^dagger a) = 1.
    let a = Mat::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0 / (n as f64).sqrt(), std::f64::consts::TAU * i as f64 / n as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let a0 = a.adjoint().to_owned();
    for (t, c) in m.correlation(&a0, &a, 4)?.iter().enumerate() {
        println!("  Tr(a^dagger a({t})) = {c:.6}");
    }
    Ok(())
}

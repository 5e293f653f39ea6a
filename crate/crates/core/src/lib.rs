//! Koopman and quantum operator channels for a pair of coupled kicked rotors.
//!
//! The crate builds the reduced one-particle propagators of the coupled
//! standard map, both classically (a truncated Fourier-basis Koopman matrix)
//! and quantum mechanically (a superoperator acting on N x N operators), and
//! provides the spectral, phase-space and reporting tools used to compare them.

pub mod bessel;
pub mod classical;
pub mod error;
pub mod field;
pub mod harness;
pub mod io;
pub mod koopman;
pub mod linalg;
pub mod phase_space;
pub mod quadrature;
pub mod quantum;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Kick strengths of the two rotors and their coupling.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SystemParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub b: f64,
}

impl SystemParams {
    pub fn new(alpha1: f64, alpha2: f64, b: f64) -> Result<Self> {
        let p = Self { alpha1, alpha2, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1.is_finite() && self.alpha2.is_finite() && self.b.is_finite()) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidParameter(format!("coupling b must be >= 0, got {}", self.b)));
        }
        Ok(())
    }
}

pub(crate) fn wrap01(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

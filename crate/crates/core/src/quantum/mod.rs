//! Quantized coupled standard map and its one-rotor channel.
//!
//! States live on an N-dimensional position basis `|n>`, `n = 0..N`. A
//! bipartite index `(i, a)` is stored at `i * N + a`, and operators are
//! vectorised row-wise, so `<ij|A> = A[i, j]`.

pub mod channel;
pub mod cptp;
pub mod factored;
pub mod reshape;
pub mod submatrix;

pub use channel::ChannelMatrix;
pub use factored::FactoredChannel;

use crate::linalg::{kron, DENSE_LIMIT};
use crate::{Error, Result, SystemParams, C64};
use faer::Mat;
use std::f64::consts::{PI, TAU};

/// Convention tag written next to persisted operators.
pub const CONVENTION_TAG: &str = "rowvec-R1R2T1T2-v1";

/// A unitary on one rotor (`bipartite == false`) or on both.
#[derive(Clone, Debug)]
pub struct UnitaryOperator {
    pub n: usize,
    pub bipartite: bool,
    pub matrix: Mat<C64>,
}

pub(crate) fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::invalid(format!("Hilbert dimension must be even and >= 2, got {n}")));
    }
    Ok(())
}

/// `U1[n', n] = (iN)^{-1/2} exp(i pi (n - n')^2 / N) exp(i (N alpha / 2 pi) cos(2 pi n / N))`
/// with `sqrt(i) = exp(i pi / 4)`: the kick followed by free rotation.
pub fn local_unitary(n: usize, alpha: f64) -> Result<UnitaryOperator> {
    check_even(n)?;
    local_kernel(n, alpha)
}

/// The same kernel without the parity check. For odd N it is still unitary,
/// though it no longer quantises the map on the torus with periodic phases.
pub(crate) fn local_kernel(n: usize, alpha: f64) -> Result<UnitaryOperator> {
    if n < 2 {
        return Err(Error::invalid(format!("Hilbert dimension must be >= 2, got {n}")));
    }
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha must be finite"));
    }
    let nf = n as f64;
    let pref = C64::from_polar(1.0 / nf.sqrt(), -PI / 4.0);
    let kick: Vec<C64> =
        (0..n).map(|k| C64::from_polar(1.0, nf * alpha / TAU * (TAU * k as f64 / nf).cos())).collect();
    let matrix = Mat::from_fn(n, n, |np, k| {
        let d = (k as i64 - np as i64).pow(2) as f64;
        // reduce the quadratic phase mod 2 before scaling to keep it accurate
        let phase = PI * ((d % (2.0 * nf)) / nf);
        pref * C64::from_polar(1.0, phase) * kick[k]
    });
    Ok(UnitaryOperator { n, bipartite: false, matrix })
}

/// Diagonal of the interaction `exp(i (N b / 2 pi) cos(2 pi (n1 + n2) / N))`.
pub fn interaction_diagonal(n: usize, b: f64) -> Vec<C64> {
    let nf = n as f64;
    (0..n * n)
        .map(|k| {
            let s = ((k / n + k % n) % n) as f64;
            C64::from_polar(1.0, nf * b / TAU * (TAU * s / nf).cos())
        })
        .collect()
}

/// Two-rotor propagator `(U1 (x) U2) U_b`.
pub fn coupled_unitary(n: usize, params: &SystemParams) -> Result<UnitaryOperator> {
    params.validate()?;
    check_even(n)?;
    if n * n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { dim: n * n, limit: DENSE_LIMIT });
    }
    let u1 = local_unitary(n, params.alpha1)?;
    let u2 = local_unitary(n, params.alpha2)?;
    let ub = interaction_diagonal(n, params.b);
    let mut m = kron(&u1.matrix, &u2.matrix);
    for (j, &d) in ub.iter().enumerate() {
        for i in 0..n * n {
            m[(i, j)] *= d;
        }
    }
    Ok(UnitaryOperator { n, bipartite: true, matrix: m })
}

/// Swap gate `S|i a> = |a i>`.
pub fn swap_operator(n: usize) -> UnitaryOperator {
    let mut m = Mat::<C64>::zeros(n * n, n * n);
    for i in 0..n {
        for a in 0..n {
            m[(a * n + i, i * n + a)] = C64::new(1.0, 0.0);
        }
    }
    UnitaryOperator { n, bipartite: true, matrix: m }
}

/// Position parity `n -> -n mod N`.
pub fn parity(n: usize) -> impl Fn(usize) -> usize {
    move |k| (n - k) % n
}

impl UnitaryOperator {
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.matrix.nrows();
        crate::linalg::max_abs_diff(&(&self.matrix * self.matrix.adjoint()), &crate::linalg::identity(d))
    }

    pub fn times(&self, other: &UnitaryOperator) -> UnitaryOperator {
        UnitaryOperator { n: self.n, bipartite: self.bipartite, matrix: &self.matrix * &other.matrix }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use proptest::prelude::*;

    // Independent scalar evaluation of the local propagator with an exact
    // integer reduction of the quadratic phase.
    fn scalar_u1(n: usize, alpha: f64, np: usize, k: usize) -> C64 {
        let d = k as i128 - np as i128;
        let r = (d * d).rem_euclid(2 * n as i128) as f64;
        let phase = -PI / 4.0 + PI * r / n as f64 + n as f64 * alpha / TAU * (TAU * k as f64 / n as f64).cos();
        C64::new(phase.cos(), phase.sin()) / (n as f64).sqrt()
    }

    #[test]
    fn rejects_odd_dimension() {
        assert!(local_unitary(5, 1.0).is_err());
        assert!(local_unitary(0, 1.0).is_err());
        assert!(coupled_unitary(3, &SystemParams::new(1.0, 1.0, 0.1).unwrap()).is_err());
    }

    #[test]
    fn local_unitary_matches_scalar_oracle() {
        let u = local_unitary(4, 1.0).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert!((u.matrix[(a, b)] - scalar_u1(4, 1.0, a, b)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn coupled_unitary_structure() {
        let p = SystemParams::new(2.0, 3.0, 0.4).unwrap();
        let u = coupled_unitary(6, &p).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        let s = swap_operator(6);
        assert!(s.unitarity_defect() == 0.0);
        // b = 0 gives the product of local propagators
        let p0 = SystemParams::new(2.0, 3.0, 0.0).unwrap();
        let u0 = coupled_unitary(6, &p0).unwrap();
        let prod = kron(&local_unitary(6, 2.0).unwrap().matrix, &local_unitary(6, 3.0).unwrap().matrix);
        assert!(max_abs_diff(&u0.matrix, &prod) < 1e-15);
    }

    proptest! {
        #[test]
        fn local_unitary_is_unitary_and_parity_symmetric(half in 1usize..16, alpha in -10.0f64..10.0) {
            let n = 2 * half;
            let u = local_unitary(n, alpha).unwrap();
            prop_assert!(u.unitarity_defect() < 1e-12);
            let p = parity(n);
            for a in 0..n { for b in 0..n {
                prop_assert!((u.matrix[(p(a), p(b))] - u.matrix[(a, b)]).norm() < 1e-12);
            }}
        }
    }
}

//! Operator entanglement and entangling power of bipartite unitaries.

use crate::bessel::bessel_j0;
use crate::linalg::frobenius;
use crate::quantum::reshape::{partial_transpose_t2, realign_r1};
use crate::quantum::{interaction_diagonal, swap_operator, UnitaryOperator};
use crate::quadrature::integrate;
use crate::{Error, Result};
use std::f64::consts::PI;

fn require_bipartite(u: &UnitaryOperator) -> Result<()> {
    if !u.bipartite {
        return Err(Error::invalid("operator entanglement needs a bipartite unitary"));
    }
    Ok(())
}

/// `1 - tr[(R R^dagger)^2] / N^4` for the reshaped operator `R`.
fn linear_entropy(r: &faer::Mat<crate::C64>, n: usize) -> f64 {
    let g = r * r.adjoint();
    let f = frobenius(&g);
    1.0 - f * f / (n as f64).powi(4)
}

/// `(E(U), E(U S))` from the realignment and the partial transpose of `U`.
pub fn operator_entanglement(u: &UnitaryOperator) -> Result<(f64, f64)> {
    require_bipartite(u)?;
    let n = u.n;
    Ok((linear_entropy(&realign_r1(&u.matrix, n), n), linear_entropy(&partial_transpose_t2(&u.matrix, n), n)))
}

/// `E(S) = 1 - 1/N^2`, the largest possible operator entanglement.
pub fn swap_entanglement(n: usize) -> f64 {
    1.0 - 1.0 / (n * n) as f64
}

/// `e_p = [E(U) + E(U S) - E(S)] / E(S)`.
pub fn entangling_power(u: &UnitaryOperator) -> Result<f64> {
    let (eu, eus) = operator_entanglement(u)?;
    let es = swap_entanglement(u.n);
    Ok((eu + eus - es) / es)
}

/// Operator entanglement of the diagonal coupling `U_b`. Its realignment has
/// a single nonzero N x N block, `u[a, i] = U_b(i a)`, so this costs O(N^3).
pub fn interaction_entanglement(n: usize, b: f64) -> f64 {
    let d = interaction_diagonal(n, b);
    let u = faer::Mat::from_fn(n, n, |a, i| d[i * n + a]);
    linear_entropy(&u, n)
}

/// For `U = (U1 (x) U2) U_b` local factors drop out and `E(U S) = E(S)`,
/// so `e_p = E(U_b) / E(S)`.
pub fn coupled_entangling_power(n: usize, b: f64) -> f64 {
    interaction_entanglement(n, b) / swap_entanglement(n)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BesselEstimate {
    pub value: f64,
    pub panels: usize,
    /// Set when `bN < 5`, where the large-N form is not expected to hold.
    pub small_argument: bool,
}

/// `1 - 2 int_0^1 x J0^2((bN/pi) sin(pi x)) dx`, integrated with panel
/// doubling until two successive values agree to 1e-10.
pub fn ep_bessel_asymptotic(n: usize, b: f64) -> Result<BesselEstimate> {
    if !(b >= 0.0 && b.is_finite()) || n == 0 {
        return Err(Error::invalid("need N > 0 and finite b >= 0"));
    }
    let z = b * n as f64 / PI;
    let f = |x: f64| {
        let j = bessel_j0(z * (PI * x).sin());
        2.0 * x * j * j
    };
    let mut panels = 8usize.max((z / 2.0).ceil() as usize);
    let mut prev = integrate(f, 0.0, 1.0, panels);
    for _ in 0..12 {
        panels *= 2;
        let cur = integrate(f, 0.0, 1.0, panels);
        if (cur - prev).abs() < 1e-10 {
            return Ok(BesselEstimate { value: 1.0 - cur, panels, small_argument: b * (n as f64) < 5.0 });
        }
        prev = cur;
    }
    Err(Error::Solver(format!("Bessel integral for N={n}, b={b} did not settle")))
}

/// `E(S)` evaluated through the generic reshaping path.
pub fn swap_entanglement_numeric(n: usize) -> Result<f64> {
    Ok(operator_entanglement(&swap_operator(n))?.0)
}

//! Classical kicked-rotor maps on the unit torus and their finite-time
//! stability exponents.

use crate::field::PhaseSpaceField;
use crate::{wrap01, Error, Result, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Default number of steps for the finite-time stability exponent.
pub const DEFAULT_FTSE_STEPS: usize = 8;
const TRACE_FLOOR: f64 = 1e-15;

/// One step of the standard map: kick, then free rotation, both mod 1.
#[inline]
pub fn standard_map_step(alpha: f64, q: f64, p: f64) -> (f64, f64) {
    let p1 = p - alpha / TAU * (TAU * q).sin();
    let q1 = q + p1;
    (wrap01(q1), wrap01(p1))
}

/// Unwrapped standard map step, useful when phases rather than positions matter.
#[inline]
pub(crate) fn standard_map_step_lifted(alpha: f64, q: f64, p: f64) -> (f64, f64) {
    let p1 = p - alpha / TAU * (TAU * q).sin();
    (q + p1, p1)
}

/// One step of the coupled map on `(q1, p1, q2, p2)`.
pub fn coupled_map_step(params: &SystemParams, s: [f64; 4]) -> [f64; 4] {
    let [q1, p1, q2, p2] = lifted_coupled_step(params, s);
    [wrap01(q1), wrap01(p1), wrap01(q2), wrap01(p2)]
}

pub(crate) fn lifted_coupled_step(params: &SystemParams, s: [f64; 4]) -> [f64; 4] {
    let [q1, p1, q2, p2] = s;
    let inter = params.b * (TAU * (q1 + q2)).sin();
    let p1n = p1 - (params.alpha1 * (TAU * q1).sin() + inter) / TAU;
    let p2n = p2 - (params.alpha2 * (TAU * q2).sin() + inter) / TAU;
    [q1 + p1n, p1n, q2 + p2n, p2n]
}

/// Tangent map of one standard-map step at position `q`, acting on `(dq, dp)`.
#[inline]
pub fn stability_matrix(alpha: f64, q: f64) -> [[f64; 2]; 2] {
    let v2 = alpha * (TAU * q).cos();
    [[1.0 - v2, 1.0], [-v2, 1.0]]
}

fn matmul2(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Tangent map accumulated along `t` steps from `(q0, p0)`, latest step on the left.
pub fn tangent_product(alpha: f64, q0: f64, p0: f64, t: usize) -> [[f64; 2]; 2] {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let (mut q, mut p) = (q0, p0);
    for _ in 0..t {
        m = matmul2(stability_matrix(alpha, q), m);
        (q, p) = standard_map_step(alpha, q, p);
    }
    m
}

/// Finite-time stability exponent `(1/t) ln |tr M_t|`.
///
/// A trace below `1e-15` in magnitude (in particular an exact zero) is clamped
/// to `1e-15`, so the value never becomes `-inf`.
pub fn ftse(alpha: f64, q0: f64, p0: f64, t: usize) -> Result<f64> {
    if t == 0 {
        return Err(Error::invalid("ftse needs t >= 1"));
    }
    let m = tangent_product(alpha, q0, p0, t);
    let tr = (m[0][0] + m[1][1]).abs().max(TRACE_FLOOR);
    Ok(tr.ln() / t as f64)
}

/// FTSE sampled at the cell centres of a G x G grid.
pub fn ftse_grid(alpha: f64, g: usize, t: usize) -> Result<PhaseSpaceField> {
    if g == 0 {
        return Err(Error::invalid("grid size must be positive"));
    }
    if t == 0 {
        return Err(Error::invalid("ftse needs t >= 1"));
    }
    let values: Vec<f64> = (0..g * g)
        .into_par_iter()
        .map(|k| {
            let q = PhaseSpaceField::center(g, k % g);
            let p = PhaseSpaceField::center(g, k / g);
            ftse(alpha, q, p, t).expect("t checked above")
        })
        .collect();
    Ok(PhaseSpaceField {
        g,
        values,
        normalization: crate::field::Normalization::Raw,
        params: serde_json::json!({ "alpha": alpha, "t": t, "quantity": "ftse" }),
    })
}

/// Mean FTSE over `samples` uniformly random initial conditions.
pub fn ftse_ensemble_mean(alpha: f64, t: usize, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..samples {
        let q: f64 = rng.random();
        let p: f64 = rng.random();
        acc += ftse(alpha, q, p, t)?;
    }
    Ok(acc / samples as f64)
}

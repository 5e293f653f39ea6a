//! Monte Carlo checks of the Koopman channel against the noisy one-rotor map.
//!
//! Averaging the second rotor out turns the interaction into a random phase
//! `z`. Each estimator averages over uniform `z` and integrates the phase-space
//! part on a periodic grid, which is spectrally accurate for these smooth integrands.

use crate::classical::{lifted_coupled_step, standard_map_step_lifted};
use crate::{Result, SystemParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Where the random interaction impulse acts within one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoisePlacement {
    /// Kick and free rotation of the local map, then the impulse
    /// `-(b/2 pi) sin 2 pi (q' + z)`. Its Koopman matrix is exactly
    /// `J0(b n) J_{m-m'}(alpha n') delta(n', m + n)`.
    AfterLocalStep,
    /// The impulse is added to the local kick before the free rotation. The
    /// resulting matrix is `J0(b n') J_{m-m'}(alpha n') delta(n', m + n)`, the
    /// same spectrum with the dephasing factor moved to the other side.
    WithLocalKick,
}

/// A Monte Carlo mean with its standard error and a quadrature error bound.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub mean: C64,
    pub std_err: f64,
    pub quadrature_err: f64,
    pub samples: usize,
}

impl Estimate {
    /// Combined uncertainty used for sigma comparisons.
    pub fn sigma(&self) -> f64 {
        self.std_err.hypot(self.quadrature_err)
    }

    pub fn agrees_with(&self, exact: C64, nsigma: f64) -> bool {
        (self.mean - exact).norm() <= nsigma * self.sigma() + 1e-13
    }
}

fn noisy_step(alpha: f64, b: f64, z: f64, q: f64, p: f64, placement: NoisePlacement) -> (f64, f64) {
    match placement {
        NoisePlacement::AfterLocalStep => {
            let (q1, p1) = standard_map_step_lifted(alpha, q, p);
            (q1, p1 - b / TAU * (TAU * (q1 + z)).sin())
        }
        NoisePlacement::WithLocalKick => {
            let p1 = p - (alpha * (TAU * q).sin() + b * (TAU * (q + z)).sin()) / TAU;
            (q + p1, p1)
        }
    }
}

#[inline]
fn fourier(m: i64, n: i64, q: f64, p: f64) -> C64 {
    C64::from_polar(1.0, TAU * (m as f64 * q + n as f64 * p))
}

/// Mean of `h` over the endpoint grids of size `g` and `g/2`.
fn grid_pair<F: Fn(f64, f64) -> C64>(g: usize, h: F) -> (C64, C64) {
    let mut fine = C64::new(0.0, 0.0);
    let mut coarse = C64::new(0.0, 0.0);
    for j in 0..g {
        let p = j as f64 / g as f64;
        for i in 0..g {
            let v = h(i as f64 / g as f64, p);
            fine += v;
            if i % 2 == 0 && j % 2 == 0 {
                coarse += v;
            }
        }
    }
    let gh = (g / 2) as f64;
    (fine / (g * g) as f64, coarse / (gh * gh))
}

fn summarize(values: &[C64], quad: f64) -> Estimate {
    let n = values.len() as f64;
    let mean: C64 = values.iter().sum::<C64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Estimate { mean, std_err: (var / n).sqrt(), quadrature_err: quad, samples: values.len() }
}

fn grid_size(bandwidth: f64) -> usize {
    let g = (4.0 * bandwidth + 64.0).ceil() as usize;
    g + g % 2
}

/// Estimate of `<target| K |mode>` from the noisy map.
pub fn stochastic_step_oracle(
    alpha: f64,
    b: f64,
    mode: (i64, i64),
    target: (i64, i64),
    samples: usize,
    seed: u64,
    placement: NoisePlacement,
) -> Estimate {
    let (m, n) = mode;
    let (mp, np) = target;
    let lin = (m.abs() + n.abs() + mp.abs() + np.abs()) as f64;
    let g = grid_size(lin + (m.abs() + n.abs() + 1) as f64 * (alpha.abs() + b) + 20.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quad = 0.0f64;
    let mut vals = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z: f64 = rng.random();
        let (fine, coarse) = grid_pair(g, |q, p| {
            let (q1, p1) = noisy_step(alpha, b, z, q, p, placement);
            fourier(mp, np, q, p).conj() * fourier(m, n, q1, p1)
        });
        quad = quad.max((fine - coarse).norm());
        vals.push(fine);
    }
    summarize(&vals, quad)
}

/// Estimate of `<g| K^2 |f>` from two independent noisy steps.
pub fn two_step_oracle(
    alpha: f64,
    b: f64,
    f: (i64, i64),
    g: (i64, i64),
    samples: usize,
    seed: u64,
    placement: NoisePlacement,
) -> Estimate {
    let lin = (f.0.abs() + f.1.abs() + g.0.abs() + g.1.abs()) as f64;
    let grid = grid_size(lin + (lin + 1.0) * (alpha.abs() + b) * (2.0 + alpha.abs()) + 40.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quad = 0.0f64;
    let mut vals = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z1: f64 = rng.random();
        let z2: f64 = rng.random();
        let (fine, coarse) = grid_pair(grid, |q, p| {
            let (q1, p1) = noisy_step(alpha, b, z1, q, p, placement);
            let (q2, p2) = noisy_step(alpha, b, z2, q1, p1, placement);
            fourier(g.0, g.1, q, p).conj() * fourier(f.0, f.1, q2, p2)
        });
        quad = quad.max((fine - coarse).norm());
        vals.push(fine);
    }
    summarize(&vals, quad)
}

/// Result of applying the complementary classical channel to probe functions.
#[derive(Clone, Debug)]
pub struct DepolarizingCheck {
    /// Largest `|K_Gamma f (xi_2) - mean(f)|` over probes and sample points.
    pub max_deviation: f64,
    pub probes: usize,
    pub points: usize,
}

/// Applies `f -> int f(Phi_1(xi_1, xi_2)) d xi_1` to a set of probe functions
/// of the first rotor and compares the result with each probe's mean.
pub fn check_gamma_depolarizing(params: &SystemParams, points: usize, seed: u64) -> Result<DepolarizingCheck> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (coefficients, modes) of band-limited probes; the mean is the (0,0) coefficient
    let mut probes: Vec<Vec<(C64, (i64, i64))>> = vec![
        vec![(C64::new(1.0, 0.0), (0, 0))],
        vec![(C64::new(1.0, 0.0), (1, 0))],
        vec![(C64::new(1.0, 0.0), (0, 1))],
        vec![(C64::new(1.0, 0.0), (1, 1))],
        vec![(C64::new(1.0, 0.0), (2, -1))],
        vec![(C64::new(1.0, 0.0), (1, -1))],
    ];
    let mut random_probe = Vec::new();
    for m in -2..=2i64 {
        for n in -2..=2i64 {
            random_probe.push((C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5), (m, n)));
        }
    }
    probes.push(random_probe);
    let band = 6.0 + 4.0 * (params.alpha1.abs() + 2.0 * params.b);
    let g = grid_size(band);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let (q2, p2): (f64, f64) = (rng.random(), rng.random());
        for probe in &probes {
            let mean = probe.iter().find(|c| c.1 == (0, 0)).map(|c| c.0).unwrap_or_default();
            let (fine, _) = grid_pair(g, |q1, p1| {
                let s = lifted_coupled_step(params, [q1, p1, q2, p2]);
                probe.iter().map(|&(c, (m, n))| c * fourier(m, n, s[0], s[1])).sum()
            });
            worst = worst.max((fine - mean).norm());
        }
    }
    Ok(DepolarizingCheck { max_deviation: worst, probes: probes.len(), points })
}

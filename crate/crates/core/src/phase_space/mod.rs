//! Coherent states on the torus and the phase-space pictures built from them.

pub mod render;

use crate::field::PhaseSpaceField;
use crate::koopman::KoopmanChannel;
use crate::quantum::check_even;
use crate::{Error, Result, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

pub use render::{render_field, write_field_csv, Colormap, RasterFormat, RenderInfo};

/// `<n|pq> ~ sum_{k=-3..3} exp[-pi N x^2 + 2 pi i p N x]`, `x = n/N - q + k`,
/// normalised to one.
pub fn torus_coherent_state(n: usize, q: f64, p: f64) -> Result<Vec<C64>> {
    check_even(n)?;
    Ok(coherent_unchecked(n, q, p))
}

fn coherent_unchecked(n: usize, q: f64, p: f64) -> Vec<C64> {
    let nf = n as f64;
    let mut v: Vec<C64> = (0..n)
        .map(|j| {
            (-3..=3)
                .map(|k| {
                    let x = j as f64 / nf - q + k as f64;
                    C64::from_polar((-PI * nf * x * x).exp(), 2.0 * PI * p * nf * x)
                })
                .sum()
        })
        .collect();
    let s = 1.0 / v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c *= s);
    v
}

/// Coherent states at `(q, p) = (a/N, c/N)`, stored at `c * N + a`.
#[derive(Clone, Debug)]
pub struct CoherentStateGrid {
    pub n: usize,
    pub states: Vec<Vec<C64>>,
}

impl CoherentStateGrid {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        let nf = n as f64;
        let states = (0..n * n)
            .into_par_iter()
            .map(|idx| coherent_unchecked(n, (idx % n) as f64 / nf, (idx / n) as f64 / nf))
            .collect();
        Ok(Self { n, states })
    }

    /// `max |(1/N) sum |pq><pq| - 1|`, elementwise.
    pub fn resolution_defect(&self) -> f64 {
        let n = self.n;
        let mut acc = vec![C64::new(0.0, 0.0); n * n];
        for s in &self.states {
            for i in 0..n {
                for j in 0..n {
                    acc[i * n + j] += s[i] * s[j].conj();
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc[i * n + j] / n as f64 - want).norm());
            }
        }
        worst
    }
}

/// Coherent states at the G x G cell centres, in the field's storage order.
fn states_on_grid(n: usize, g: usize) -> Vec<Vec<C64>> {
    (0..g * g)
        .into_par_iter()
        .map(|idx| coherent_unchecked(n, PhaseSpaceField::center(g, idx % g), PhaseSpaceField::center(g, idx / g)))
        .collect()
}

fn check_grid(g: usize) -> Result<()> {
    if g == 0 {
        return Err(Error::invalid("grid size must be positive"));
    }
    Ok(())
}

/// `h(q, p) = |<pq|psi>|^2` on the grid. For `G >= N` the values satisfy
/// `(N / G^2) sum h = <psi|psi>` to high accuracy.
pub fn husimi_state(psi: &[C64], g: usize) -> Result<PhaseSpaceField> {
    let n = psi.len();
    check_even(n)?;
    check_grid(g)?;
    let values = states_on_grid(n, g)
        .par_iter()
        .map(|c| crate::linalg::dot(c, psi).norm_sqr())
        .collect();
    Ok(field(g, values, serde_json::json!({"kind": "husimi_state", "N": n, "G": g})))
}

/// Which eigenmode of a channel a Husimi picture uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSide {
    Right,
    Left,
}

/// `|<pq| (x) <pq*| X>|^2` for a row-vectorised operator mode `X`, with
/// `<pq*|` the componentwise conjugate of `<pq|`. Equals `|<pq|X|pq>|^2`.
pub fn husimi_mode(mode: &[C64], g: usize) -> Result<PhaseSpaceField> {
    let n = operator_side(mode.len())?;
    check_grid(g)?;
    let values = states_on_grid(n, g)
        .par_iter()
        .map(|c| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                let ci = c[i].conj();
                for j in 0..n {
                    s += ci * c[j] * mode[i * n + j];
                }
            }
            s.norm_sqr()
        })
        .collect();
    Ok(field(g, values, serde_json::json!({"kind": "husimi_mode", "N": n, "G": g})))
}

/// The same quantity written as an inner product with `conj(c) (x) c`.
pub fn husimi_mode_tensor(mode: &[C64], g: usize) -> Result<PhaseSpaceField> {
    let n = operator_side(mode.len())?;
    check_grid(g)?;
    let values = states_on_grid(n, g)
        .par_iter()
        .map(|c| {
            let bra: Vec<C64> = (0..n * n).map(|k| c[k / n] * c[k % n].conj()).collect();
            crate::linalg::dot(&bra, mode).norm_sqr()
        })
        .collect();
    Ok(field(g, values, serde_json::json!({"kind": "husimi_mode", "N": n, "G": g})))
}

fn operator_side(len: usize) -> Result<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(Error::invalid(format!("mode length {len} is not a square")));
    }
    check_even(n)?;
    Ok(n)
}

fn field(g: usize, values: Vec<f64>, params: serde_json::Value) -> PhaseSpaceField {
    PhaseSpaceField { g, values, normalization: crate::field::Normalization::Raw, params }
}

/// `|f(q, p)|^2` with `f = sum phi_mn exp(2 pi i (m q + n p))`. The grid must
/// exceed `2M` so that the samples resolve every mode difference.
pub fn fourier_mode_field(channel: &KoopmanChannel, coeffs: &[C64], g: usize) -> Result<PhaseSpaceField> {
    let m = channel.cutoff as i64;
    if coeffs.len() != channel.dimension() {
        return Err(Error::invalid("coefficient vector does not match the truncation"));
    }
    if g as i64 <= 2 * m {
        return Err(Error::invalid(format!("grid G={g} aliases modes up to 2M={}", 2 * m)));
    }
    let side = channel.side();
    // phases e^{2 pi i k x} on the grid centres for k in [-M, M]
    let tab: Vec<Vec<C64>> = (0..g)
        .map(|i| {
            let x = PhaseSpaceField::center(g, i);
            (-m..=m).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 * x)).collect()
        })
        .collect();
    // sum over n first: a[i_p][m] = sum_n phi_mn e^{2 pi i n p}
    let partial: Vec<Vec<C64>> = (0..g)
        .into_par_iter()
        .map(|jp| {
            (0..side)
                .map(|a| (0..side).map(|b| coeffs[a * side + b] * tab[jp][b]).sum())
                .collect()
        })
        .collect();
    let mut values = vec![0.0; g * g];
    values.par_chunks_mut(g).enumerate().for_each(|(jp, row)| {
        for (iq, v) in row.iter_mut().enumerate() {
            let f: C64 = (0..side).map(|a| partial[jp][a] * tab[iq][a]).sum();
            *v = f.norm_sqr();
        }
    });
    Ok(field(g, values, serde_json::json!({"kind": "fourier_mode", "M": m, "G": g})))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::local_unitary;
    use crate::quantum::submatrix::local_eigenbasis;

    #[test]
    fn coherent_states_resolve_identity() {
        for n in [20, 60] {
            let grid = CoherentStateGrid::new(n).unwrap();
            assert!(grid.resolution_defect() < 1e-8, "N={n}");
            assert!(grid.states.iter().all(|s| (crate::linalg::norm(s) - 1.0).abs() < 1e-12));
        }
        assert!(torus_coherent_state(7, 0.1, 0.2).is_err());
    }

    #[test]
    fn overlap_is_gaussian_in_distance() {
        let n = 40;
        let a = torus_coherent_state(n, 0.3, 0.6).unwrap();
        let mut prev = 1.0;
        for d in [0.0, 0.05, 0.1, 0.15, 0.2] {
            let b = torus_coherent_state(n, 0.3 + d, 0.6).unwrap();
            let o = crate::linalg::dot(&a, &b).norm_sqr();
            let want = (-PI * n as f64 * d * d).exp();
            assert!((o - want).abs() < 1e-6, "{d}: {o} vs {want}");
            assert!(o <= prev + 1e-12);
            prev = o;
        }
    }

    #[test]
    fn husimi_sum_rules() {
        let n = 20;
        let psi: Vec<C64> = (0..n).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        // coherent grid: N-fold resolution of identity
        let grid = CoherentStateGrid::new(n).unwrap();
        let s: f64 = grid.states.iter().map(|c| crate::linalg::dot(c, &psi).norm_sqr()).sum();
        assert!((s - n as f64 * norm2).abs() < 1e-8 * n as f64);
        let h = husimi_state(&psi, 40).unwrap();
        let total = h.values.iter().sum::<f64>() * n as f64 / 1600.0;
        assert!((total - norm2).abs() < 1e-6 * norm2);
        assert!(h.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn position_state_sits_on_q_zero() {
        let n = 40;
        let mut psi = vec![C64::new(0.0, 0.0); n];
        psi[0] = C64::new(1.0, 0.0);
        let h = husimi_state(&psi, 40).unwrap();
        let col = |i: usize| (0..40).map(|j| h.at(i, j)).sum::<f64>();
        assert!(col(0) > 10.0 * col(10));
        assert!((h.at(0, 3) - h.at(0, 30)).abs() < 1e-10);
    }

    #[test]
    fn period_two_island_shows_in_eigenstates() {
        let n = 100;
        let u = local_unitary(n, 6.0).unwrap();
        let basis = local_eigenbasis(&u.matrix).unwrap();
        let islands = [(0.0, 0.5), (0.5, 0.5)];
        let mut found = false;
        for k in 0..n {
            let psi: Vec<C64> = (0..n).map(|i| basis.vectors[(i, k)]).collect();
            let h = husimi_state(&psi, 60).unwrap();
            let (mut best, mut at) = (0.0, (0.0, 0.0));
            for j in 0..60 {
                for i in 0..60 {
                    if h.at(i, j) > best {
                        best = h.at(i, j);
                        at = (PhaseSpaceField::center(60, i), PhaseSpaceField::center(60, j));
                    }
                }
            }
            if islands.iter().any(|&(q, p)| crate::field::torus_dist(at.0, q).hypot(crate::field::torus_dist(at.1, p)) < 0.1) {
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn tensor_and_operator_forms_agree() {
        let n = 8;
        let x: Vec<C64> = (0..n * n).map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64 * 0.2).cos())).collect();
        let a = husimi_mode(&x, 16).unwrap();
        let b = husimi_mode_tensor(&x, 16).unwrap();
        let d = a.values.iter().zip(&b.values).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(d < 1e-12);
        let triv = crate::quantum::channel::trivial_mode(n);
        let t = husimi_mode(&triv, 10).unwrap();
        assert!(t.values.iter().all(|v| (v - 1.0 / n as f64).abs() < 1e-12));
    }

    #[test]
    fn fourier_field_parseval_and_guard() {
        let k = KoopmanChannel::build(3, 1.0, 0.2).unwrap();
        let phi: Vec<C64> = (0..k.dimension()).map(|i| C64::new((i as f64).cos(), (i as f64 * 1.3).sin())).collect();
        let f = fourier_mode_field(&k, &phi, 9).unwrap();
        let lhs = f.values.iter().sum::<f64>() / 81.0;
        let rhs: f64 = phi.iter().map(|c| c.norm_sqr()).sum();
        assert!((lhs - rhs).abs() < 1e-8);
        assert!(fourier_mode_field(&k, &phi, 6).is_err());
        let c = fourier_mode_field(&k, &k.trivial_mode(), 12).unwrap();
        assert!(c.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}

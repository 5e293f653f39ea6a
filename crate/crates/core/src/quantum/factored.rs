//! The coupled-map channel in factored form `M = D_b (U1^dagger (x) U1^T)`.
//!
//! `D_b` is diagonal in `|k' k>` with entries `A[k', k]`, so the channel acts as
//! `X -> A o (U1^dagger X U1)` (Hadamard product) in O(N^3) operations without
//! forming the N^2 x N^2 matrix.

use super::channel::{trivial_mode, ChannelMatrix};
use super::{check_even, local_unitary, parity};
use crate::bessel::bessel_j0;
use crate::linalg::blocks::{hermitian_sectors, Sector, SparseVec};
use crate::linalg::{LinearMap, DENSE_LIMIT};
use crate::{Error, Result, SystemParams, C64};
use faer::Mat;
use std::f64::consts::PI;

/// Dephasing entries `A[k', k] = (1/N) sum_l exp{i (bN/pi) sin[pi(k-k')/N] sin[pi(k+k'-2l)/N]}`.
pub fn dephasing_matrix(n: usize, b: f64) -> Mat<C64> {
    let nf = n as f64;
    let c = b * nf / PI;
    Mat::from_fn(n, n, |kp, k| {
        let s1 = (PI * (k as f64 - kp as f64) / nf).sin();
        let mut acc = C64::new(0.0, 0.0);
        for l in 0..n {
            let s2 = (PI * (k as f64 + kp as f64 - 2.0 * l as f64) / nf).sin();
            acc += C64::from_polar(1.0, c * s1 * s2);
        }
        acc / nf
    })
}

/// Large-N approximation `A[k', k] ~ J0[(bN/pi) sin(pi (k - k')/N)]`.
pub fn dephasing_bessel_approx(n: usize, b: f64) -> Mat<f64> {
    let nf = n as f64;
    Mat::from_fn(n, n, |kp, k| bessel_j0(b * nf / PI * (PI * (k as f64 - kp as f64) / nf).sin()))
}

#[derive(Clone, Debug)]
pub struct FactoredChannel {
    pub n: usize,
    pub params: SystemParams,
    pub u1: Mat<C64>,
    pub dephasing: Mat<C64>,
}

impl FactoredChannel {
    pub fn build(n: usize, params: &SystemParams) -> Result<Self> {
        params.validate()?;
        check_even(n)?;
        Ok(Self {
            n,
            params: *params,
            u1: local_unitary(n, params.alpha1)?.matrix,
            dephasing: dephasing_matrix(n, params.b),
        })
    }

    /// Like `build` but also accepts odd N, for ring-size comparisons across
    /// Hilbert dimensions such as N = 75.
    pub fn build_any_parity(n: usize, params: &SystemParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            n,
            params: *params,
            u1: super::local_kernel(n, params.alpha1)?.matrix,
            dephasing: dephasing_matrix(n, params.b),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n * self.n
    }

    /// Dense N^2 x N^2 matrix of the channel.
    pub fn to_dense(&self) -> Result<ChannelMatrix> {
        let n = self.n;
        if n * n > DENSE_LIMIT {
            return Err(Error::DimensionTooLarge { dim: n * n, limit: DENSE_LIMIT });
        }
        let u = &self.u1;
        let a = &self.dephasing;
        let m = Mat::from_fn(n * n, n * n, |r, c| {
            let (kp, lp) = (r / n, r % n);
            let (k, l) = (c / n, c % n);
            a[(kp, lp)] * u[(k, kp)].conj() * u[(l, lp)]
        });
        Ok(ChannelMatrix { n, matrix: m, params: Some(self.params) })
    }

    /// Applies the channel to an operator given as a matrix.
    pub fn apply_operator(&self, x: &Mat<C64>) -> Mat<C64> {
        let y = &(self.u1.adjoint() * x) * &self.u1;
        Mat::from_fn(self.n, self.n, |i, j| y[(i, j)] * self.dephasing[(i, j)])
    }

    /// `A o (U1^dagger X U1)` for an `X` with few nonzero entries, each
    /// contributing one rank-one term.
    pub fn apply_sparse(&self, v: &SparseVec, out: &mut [C64]) {
        let n = self.n;
        let u = &self.u1;
        for &(idx, c) in &v.0 {
            let (k, l) = (idx / n, idx % n);
            for i in 0..n {
                let left = u[(k, i)].conj() * c;
                for j in 0..n {
                    out[i * n + j] += left * u[(l, j)];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] *= self.dephasing[(i, j)];
            }
        }
    }

    /// Hermitian sectors of definite parity; the channel is block diagonal here.
    pub fn sectors(&self) -> Vec<Sector> {
        let p = parity(self.n);
        hermitian_sectors(self.n, Some(&p))
    }

    pub fn trivial_mode(&self) -> Vec<C64> {
        trivial_mode(self.n)
    }

    /// Frobenius norm squared of the channel minus the trivial pair.
    pub fn deflated_norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.n {
            for i in 0..self.n {
                s += self.dephasing[(i, j)].norm_sqr();
            }
        }
        s - 1.0
    }

    /// Singular values of the channel: the moduli of the dephasing entries.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = (0..self.n * self.n).map(|k| self.dephasing[(k / self.n, k % self.n)].norm()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

impl LinearMap for FactoredChannel {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let xm = crate::linalg::unvec(x, self.n);
        let r = self.apply_operator(&xm);
        for i in 0..self.n {
            for j in 0..self.n {
                y[i * self.n + j] = r[(i, j)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, vec_row};
    use crate::quantum::channel::channel_from_unitary;
    use crate::quantum::{coupled_unitary, interaction_diagonal, UnitaryOperator};

    #[test]
    fn dephasing_properties() {
        for (n, b) in [(8, 0.3), (20, 0.1), (30, 1.7)] {
            let a = dephasing_matrix(n, b);
            for i in 0..n {
                assert!((a[(i, i)] - 1.0).norm() < 1e-14);
                for j in 0..n {
                    assert!((a[(i, j)] - a[(j, i)].conj()).norm() < 1e-14);
                    assert!(a[(i, j)].norm() <= 1.0 + 1e-14);
                }
            }
            // positive semidefinite
            let ev = a.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
            assert!(ev[0] > -1e-12);
        }
    }

    #[test]
    fn dephasing_is_the_interaction_channel() {
        // M(U_b) is diagonal with the same entries
        let n = 6;
        let ub = interaction_diagonal(n, 0.8);
        let u = UnitaryOperator {
            n,
            bipartite: true,
            matrix: Mat::from_fn(n * n, n * n, |i, j| if i == j { ub[i] } else { C64::new(0.0, 0.0) }),
        };
        let m = channel_from_unitary(&u).unwrap();
        let a = dephasing_matrix(n, 0.8);
        for r in 0..n * n {
            for c in 0..n * n {
                let want = if r == c { a[(r / n, r % n)] } else { C64::new(0.0, 0.0) };
                assert!((m.matrix[(r, c)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn bessel_approximation_improves_with_n() {
        let err = |n: usize, b: f64| {
            let a = dephasing_matrix(n, b);
            let j = dephasing_bessel_approx(n, b);
            (0..n * n).map(|k| (a[(k / n, k % n)] - j[(k / n, k % n)]).norm()).fold(0.0, f64::max)
        };
        let (e8, e16) = (err(8, 2.0), err(16, 2.0));
        assert!(e8 > 1e-6, "{e8}");
        assert!(e16 < e8 / 10.0, "{e8} {e16}");
        assert!(err(60, 1.0) < 1e-12);
    }

    #[test]
    fn factored_equals_generic_and_ignores_alpha2() {
        let p = SystemParams::new(2.0, 3.0, 0.4).unwrap();
        let generic = channel_from_unitary(&coupled_unitary(8, &p).unwrap()).unwrap();
        let fast = FactoredChannel::build(8, &p).unwrap().to_dense().unwrap();
        assert!(generic.max_abs_diff(&fast) < 1e-12);
        let p2 = SystemParams::new(2.0, 7.5, 0.4).unwrap();
        let other = channel_from_unitary(&coupled_unitary(8, &p2).unwrap()).unwrap();
        assert!(generic.max_abs_diff(&other) < 1e-12);
    }

    #[test]
    fn matvec_matches_dense() {
        use rand::{Rng, SeedableRng};
        let p = SystemParams::new(3.0, 0.0, 0.25).unwrap();
        let f = FactoredChannel::build(20, &p).unwrap();
        let d = f.to_dense().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x: Vec<C64> = (0..400).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let mut y1 = vec![C64::new(0.0, 0.0); 400];
        let mut y2 = y1.clone();
        f.apply(&x, &mut y1);
        d.apply(&x, &mut y2);
        assert!(y1.iter().zip(&y2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < 1e-12);
        let e = f.trivial_mode();
        f.apply(&e, &mut y1);
        assert!(y1.iter().zip(&e).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < 1e-14);
        // sparse path
        let v = SparseVec(vec![(3, C64::new(0.5, 0.1)), (47, C64::new(-0.2, 0.3))]);
        let mut ys = vec![C64::new(0.0, 0.0); 400];
        f.apply_sparse(&v, &mut ys);
        f.apply(&v.to_dense(400), &mut y1);
        assert!(ys.iter().zip(&y1).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < 1e-14);
    }

    #[test]
    fn global_phase_of_u1_drops_out() {
        let p = SystemParams::new(1.2, 0.0, 0.3).unwrap();
        let mut f = FactoredChannel::build(6, &p).unwrap();
        let base = f.to_dense().unwrap();
        let ph = C64::from_polar(1.0, 0.77);
        for j in 0..6 {
            for i in 0..6 {
                f.u1[(i, j)] *= ph;
            }
        }
        assert!(base.max_abs_diff(&f.to_dense().unwrap()) < 1e-15);
    }

    #[test]
    fn singular_values_do_not_depend_on_alpha() {
        let f2 = FactoredChannel::build(10, &SystemParams::new(2.0, 0.0, 0.1).unwrap()).unwrap();
        let f6 = FactoredChannel::build(10, &SystemParams::new(6.0, 0.0, 0.1).unwrap()).unwrap();
        let s2 = f2.to_dense().unwrap().matrix.singular_values().unwrap();
        let s6 = f6.to_dense().unwrap().matrix.singular_values().unwrap();
        for ((a, b), c) in s2.iter().zip(&s6).zip(f2.singular_values()) {
            assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
        }
    }

    #[test]
    fn hermiticity_is_preserved() {
        let p = SystemParams::new(2.5, 0.0, 0.6).unwrap();
        let f = FactoredChannel::build(8, &p).unwrap();
        let x = Mat::from_fn(8, 8, |i, j| C64::new((i + j) as f64, i as f64 - j as f64));
        let y = f.apply_operator(&x);
        assert!(max_abs_diff(&y, &y.adjoint().to_owned()) < 1e-13);
        let _ = vec_row(&y);
    }
}

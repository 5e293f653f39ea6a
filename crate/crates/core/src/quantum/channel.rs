//! The one-rotor channel `M(U)` of a bipartite unitary and its complement.

use super::reshape::{partial_transpose_t2, realign_r1, realign_r2};
use super::UnitaryOperator;
use crate::linalg::{max_abs_diff, LinearMap};
use crate::{Error, Result, SystemParams, C64};
use faer::Mat;

/// Superoperator on row-vectorised N x N operators.
#[derive(Clone, Debug)]
pub struct ChannelMatrix {
    pub n: usize,
    pub matrix: Mat<C64>,
    pub params: Option<SystemParams>,
}

fn require_bipartite(u: &UnitaryOperator) -> Result<()> {
    if !u.bipartite || u.matrix.nrows() != u.n * u.n {
        return Err(Error::invalid("expected a bipartite N^2 x N^2 unitary"));
    }
    Ok(())
}

/// `M(U) = (1/N) [U^{R1 dagger} U^{R1}]^{R2}`, i.e. `a -> Tr_2[U^dagger (a (x) 1/N) U]`.
pub fn channel_from_unitary(u: &UnitaryOperator) -> Result<ChannelMatrix> {
    require_bipartite(u)?;
    let n = u.n;
    let r1 = realign_r1(&u.matrix, n);
    let prod = r1.adjoint() * &r1;
    let mut m = realign_r2(&prod, n);
    let inv = 1.0 / n as f64;
    for j in 0..n * n {
        for i in 0..n * n {
            m[(i, j)] *= inv;
        }
    }
    Ok(ChannelMatrix { n, matrix: m, params: None })
}

/// `M_C(U) = (1/N) [U^{T2} U^{T2 dagger}]^{R1}`, i.e. `a -> Tr_1[U^dagger (a (x) 1/N) U]`.
pub fn complementary_channel(u: &UnitaryOperator) -> Result<ChannelMatrix> {
    require_bipartite(u)?;
    let n = u.n;
    let t2 = partial_transpose_t2(&u.matrix, n);
    let prod = &t2 * t2.adjoint();
    let mut m = realign_r1(&prod, n);
    let inv = 1.0 / n as f64;
    for j in 0..n * n {
        for i in 0..n * n {
            m[(i, j)] *= inv;
        }
    }
    Ok(ChannelMatrix { n, matrix: m, params: None })
}

/// Partial-trace construction of `M(U)` from explicit index sums.
pub fn brute_force_channel(u: &UnitaryOperator) -> Result<ChannelMatrix> {
    require_bipartite(u)?;
    let n = u.n;
    let w = |i: usize, a: usize, j: usize, b: usize| u.matrix[(i * n + a, j * n + b)];
    let mut m = Mat::<C64>::zeros(n * n, n * n);
    for k in 0..n {
        for l in 0..n {
            // column for the input operator |k><l|
            for kp in 0..n {
                for lp in 0..n {
                    let mut s = C64::new(0.0, 0.0);
                    for a in 0..n {
                        for b in 0..n {
                            s += w(k, b, kp, a).conj() * w(l, b, lp, a);
                        }
                    }
                    m[(kp * n + lp, k * n + l)] = s / n as f64;
                }
            }
        }
    }
    Ok(ChannelMatrix { n, matrix: m, params: None })
}

/// Partial-trace construction of `M_C(U)`.
pub fn brute_force_complementary(u: &UnitaryOperator) -> Result<ChannelMatrix> {
    require_bipartite(u)?;
    let n = u.n;
    let w = |i: usize, a: usize, j: usize, b: usize| u.matrix[(i * n + a, j * n + b)];
    let mut m = Mat::<C64>::zeros(n * n, n * n);
    for k in 0..n {
        for l in 0..n {
            for ap in 0..n {
                for bp in 0..n {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..n {
                        for g in 0..n {
                            s += w(k, g, i, ap).conj() * w(l, g, i, bp);
                        }
                    }
                    m[(ap * n + bp, k * n + l)] = s / n as f64;
                }
            }
        }
    }
    Ok(ChannelMatrix { n, matrix: m, params: None })
}

/// Vectorised identity divided by sqrt(N).
pub fn trivial_mode(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    let s = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        v[k * n + k] = C64::new(s, 0.0);
    }
    v
}

impl ChannelMatrix {
    pub fn dimension(&self) -> usize {
        self.n * self.n
    }

    /// `max(|M e - e|, |M^dagger e - e|)` for the vectorised identity `e`.
    pub fn unitality_residual(&self) -> f64 {
        let e = trivial_mode(self.n);
        let d = self.dimension();
        let mut y = vec![C64::new(0.0, 0.0); d];
        self.apply(&e, &mut y);
        let right = y.iter().zip(&e).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let adj = self.matrix.adjoint().to_owned();
        crate::linalg::dense_matvec(&adj, &e, &mut y);
        let left = y.iter().zip(&e).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        right.max(left)
    }

    /// Frobenius norm squared of `M` after removing the trivial pair.
    pub fn deflated_norm_sqr(&self) -> f64 {
        let f = crate::linalg::frobenius(&self.matrix);
        f * f - 1.0
    }

    pub fn max_abs_diff(&self, other: &ChannelMatrix) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// `<a0^dagger| M^t |a> = Tr(a0 a(t))` for `t = 0..=t_max`.
    pub fn correlation(&self, a0: &Mat<C64>, a: &Mat<C64>, t_max: usize) -> Result<Vec<C64>> {
        operator_correlation(self, self.n, a0, a, t_max)
    }
}

impl LinearMap for ChannelMatrix {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        crate::linalg::dense_matvec(&self.matrix, x, y);
    }
}

/// Two-point correlation `Tr(a0 a(t))` under repeated application of a channel.
pub fn operator_correlation(
    map: &dyn LinearMap,
    n: usize,
    a0: &Mat<C64>,
    a: &Mat<C64>,
    t_max: usize,
) -> Result<Vec<C64>> {
    if map.dim() != n * n || a0.nrows() != n || a.nrows() != n || a0.ncols() != n || a.ncols() != n {
        return Err(Error::invalid("operator shapes do not match the channel"));
    }
    let mut cur = crate::linalg::vec_row(a);
    let mut next = vec![C64::new(0.0, 0.0); n * n];
    // <a0^dagger| x> = sum_ij a0[j, i] x[i, j]
    let bra = |x: &[C64]| -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += a0[(j, i)] * x[i * n + j];
            }
        }
        s
    };
    let mut out = vec![bra(&cur)];
    for _ in 0..t_max {
        map.apply(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        out.push(bra(&cur));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{coupled_unitary, swap_operator};

    fn random_unitary(n: usize, seed: u64) -> UnitaryOperator {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = n * n;
        let a = Mat::<C64>::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let q = a.qr().compute_thin_Q();
        UnitaryOperator { n, bipartite: true, matrix: q }
    }

    #[test]
    fn realignment_matches_partial_trace() {
        let u = random_unitary(4, 1);
        assert!(channel_from_unitary(&u).unwrap().max_abs_diff(&brute_force_channel(&u).unwrap()) < 1e-14);
        assert!(
            complementary_channel(&u).unwrap().max_abs_diff(&brute_force_complementary(&u).unwrap()) < 1e-14
        );
    }

    #[test]
    fn swap_duality() {
        // M_C(U) = M(U S)
        let p = SystemParams::new(1.5, 2.5, 0.3).unwrap();
        let u = coupled_unitary(6, &p).unwrap();
        let us = u.times(&swap_operator(6));
        let mc = complementary_channel(&u).unwrap();
        assert!(mc.max_abs_diff(&channel_from_unitary(&us).unwrap()) < 1e-13);
    }

    #[test]
    fn complement_of_coupled_map_depolarizes() {
        let p = SystemParams::new(2.0, 4.0, 0.7).unwrap();
        let u = coupled_unitary(6, &p).unwrap();
        let mc = complementary_channel(&u).unwrap();
        let e = trivial_mode(6);
        let proj = Mat::from_fn(36, 36, |i, j| e[i] * e[j].conj());
        assert!(crate::linalg::max_abs_diff(&mc.matrix, &proj) < 1e-10);
    }

    #[test]
    fn swap_channel_is_completely_depolarizing_and_identity_is_not() {
        let s = swap_operator(4);
        let m = channel_from_unitary(&s).unwrap();
        assert!((m.deflated_norm_sqr()).abs() < 1e-14);
        let id = UnitaryOperator { n: 4, bipartite: true, matrix: crate::linalg::identity(16) };
        let mi = channel_from_unitary(&id).unwrap();
        assert!(crate::linalg::max_abs_diff(&mi.matrix, &crate::linalg::identity(16)) < 1e-15);
    }

    #[test]
    fn correlation_of_identity_is_one() {
        let p = SystemParams::new(2.0, 1.0, 0.4).unwrap();
        let m = channel_from_unitary(&coupled_unitary(6, &p).unwrap()).unwrap();
        let id = crate::linalg::identity(6);
        let s = 1.0 / 6f64.sqrt();
        let a = Mat::from_fn(6, 6, |i, j| id[(i, j)] * s);
        for c in m.correlation(&a, &a, 5).unwrap() {
            assert!((c - 1.0).norm() < 1e-12);
        }
    }
}

//! The Hermitian block of the channel on the span of `|phi_k><phi_k|`, with
//! `phi_k` the eigenvectors of the local propagator.

use super::{check_even, local_unitary};
use crate::{Error, Result, C64};
use faer::{Mat, Side};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

/// Eigenvectors of `U1` as columns, ordered by eigenphase in `[0, 2 pi)`.
#[derive(Clone, Debug)]
pub struct LocalEigenbasis {
    pub phases: Vec<f64>,
    pub vectors: Mat<C64>,
    pub residual: f64,
}

fn parity_basis(n: usize) -> (Vec<Vec<(usize, f64)>>, Vec<Vec<(usize, f64)>>) {
    let h = n / 2;
    let mut even = vec![vec![(0, 1.0)], vec![(h, 1.0)]];
    let mut odd = Vec::new();
    for k in 1..h {
        even.push(vec![(k, FRAC_1_SQRT_2), (n - k, FRAC_1_SQRT_2)]);
        odd.push(vec![(k, FRAC_1_SQRT_2), (n - k, -FRAC_1_SQRT_2)]);
    }
    (even, odd)
}

/// Diagonalises a parity-symmetric unitary sector by sector, so that the
/// degenerate pairs of the free rotor still get orthonormal eigenvectors.
pub fn local_eigenbasis(u: &Mat<C64>) -> Result<LocalEigenbasis> {
    let n = u.nrows();
    check_even(n)?;
    let (even, odd) = parity_basis(n);
    let mut pairs: Vec<(f64, Vec<C64>)> = Vec::with_capacity(n);
    for sector in [even, odd] {
        if sector.is_empty() {
            continue;
        }
        let d = sector.len();
        let b = Mat::from_fn(n, d, |i, c| {
            C64::new(sector[c].iter().find(|e| e.0 == i).map(|e| e.1).unwrap_or(0.0), 0.0)
        });
        let red = &(b.adjoint() * u) * &b;
        let eig = red.eigen().map_err(|e| Error::Solver(format!("local eigensolver: {e:?}")))?;
        let vals: Vec<C64> = (0..d).map(|i| eig.S()[i]).collect();
        let mut vecs: Vec<Vec<C64>> = (0..d).map(|j| (0..d).map(|i| eig.U()[(i, j)]).collect()).collect();
        // re-orthonormalise clusters of (near) equal eigenvalues
        for j in 0..d {
            for i in 0..j {
                if (vals[i] - vals[j]).norm() < 1e-8 {
                    let c: C64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a.conj() * b).sum();
                    let vi = vecs[i].clone();
                    for (x, y) in vecs[j].iter_mut().zip(&vi) {
                        *x -= c * y;
                    }
                }
            }
            let nrm = vecs[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            vecs[j].iter_mut().for_each(|c| *c /= nrm);
        }
        for (lam, x) in vals.iter().zip(vecs) {
            let full: Vec<C64> = (0..n).map(|i| (0..d).map(|c| b[(i, c)] * x[c]).sum()).collect();
            pairs.push((lam.arg().rem_euclid(TAU), fix_phase(full)));
        }
    }
    pairs.sort_by(|a, b| {
        if (a.0 - b.0).abs() < 1e-10 {
            b.1[0].norm().total_cmp(&a.1[0].norm())
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    let vectors = Mat::from_fn(n, n, |i, j| pairs[j].1[i]);
    let phases: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut residual = 0.0f64;
    let uv = u * &vectors;
    for j in 0..n {
        let lam = C64::from_polar(1.0, phases[j]);
        for i in 0..n {
            residual = residual.max((uv[(i, j)] - lam * vectors[(i, j)]).norm());
        }
    }
    if residual > 1e-8 {
        return Err(Error::Solver(format!("local eigenbasis residual {residual:.3e}")));
    }
    Ok(LocalEigenbasis { phases, vectors, residual })
}

/// Overall phase chosen so that the largest component is real and positive.
pub(crate) fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let (mut best, mut idx) = (0.0, 0);
    for (i, c) in v.iter().enumerate() {
        if c.norm() > best + 1e-12 {
            best = c.norm();
            idx = i;
        }
    }
    if best > 0.0 {
        let ph = v[idx].conj() / best;
        v.iter_mut().for_each(|c| *c *= ph);
    }
    v
}

/// `d_ij(b) = (1/N) sum_k exp[i (theta_ik - theta_jk)]`, `theta_jk = (Nb/2pi) cos(2pi(j+k)/N)`.
pub fn dephasing_weights(n: usize, b: f64) -> Mat<C64> {
    let nf = n as f64;
    let theta = |j: usize, k: usize| nf * b / TAU * (TAU * ((j + k) % n) as f64 / nf).cos();
    Mat::from_fn(n, n, |i, j| {
        (0..n).map(|k| C64::from_polar(1.0, theta(i, k) - theta(j, k))).sum::<C64>() / nf
    })
}

#[derive(Clone, Debug)]
pub struct SubmatrixHermitian {
    pub matrix: Mat<C64>,
    pub basis: LocalEigenbasis,
}

/// `M_S[k', k] = sum_ij d_ij <phi_k'|i><j|phi_k'><i|phi_k><phi_k|j>`.
pub fn build_submatrix(n: usize, alpha: f64, b: f64) -> Result<SubmatrixHermitian> {
    check_even(n)?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::invalid("b must be finite and >= 0"));
    }
    let u = local_unitary(n, alpha)?;
    let basis = local_eigenbasis(&u.matrix)?;
    let d = dephasing_weights(n, b);
    Ok(SubmatrixHermitian { matrix: assemble(&basis.vectors, &d), basis })
}

fn assemble(phi: &Mat<C64>, d: &Mat<C64>) -> Mat<C64> {
    let n = phi.nrows();
    let mut out = Mat::<C64>::zeros(n, n);
    let mut g = vec![C64::new(0.0, 0.0); n];
    let mut dg = vec![C64::new(0.0, 0.0); n];
    for kp in 0..n {
        for k in 0..n {
            for i in 0..n {
                g[i] = phi[(i, kp)].conj() * phi[(i, k)];
            }
            // sum_ij g_i d_ij conj(g_j)
            for i in 0..n {
                dg[i] = (0..n).map(|j| d[(i, j)] * g[j].conj()).sum();
            }
            out[(kp, k)] = (0..n).map(|i| g[i] * dg[i]).sum();
        }
    }
    out
}

impl SubmatrixHermitian {
    pub fn hermiticity_defect(&self) -> f64 {
        crate::linalg::max_abs_diff(&self.matrix, &self.matrix.adjoint().to_owned())
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.matrix.nrows();
        let sym = Mat::from_fn(n, n, |i, j| (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * 0.5);
        let mut ev = sym
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Solver(format!("submatrix eigenvalues: {e:?}")))?;
        ev.reverse();
        Ok(ev)
    }

    /// Largest eigenvalue after removing the trivial one, which the vector
    /// of ones (the identity operator) always carries.
    pub fn top_nontrivial(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        let k = ev
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
            .map(|e| e.0)
            .unwrap_or(0);
        Ok(ev.iter().enumerate().filter(|e| e.0 != k).map(|e| *e.1).fold(f64::NEG_INFINITY, f64::max))
    }
}

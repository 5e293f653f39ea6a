//! Krylov-Schur iteration for the largest-modulus eigenvalues of a
//! matrix-free operator.

use super::{modulus_order, EigenPair, SpectralDecomposition};
use crate::linalg::schur::schur;
use crate::linalg::{dot, norm, LinearMap};
use crate::{Error, Result, C64};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug)]
pub struct KrylovOptions {
    /// Bound on `|M x - theta x|` for every returned unit Ritz pair.
    pub tol: f64,
    pub seed: u64,
    pub max_restarts: usize,
    /// Krylov basis size. Defaults to `max(3k, k + 40)`; clustered moduli
    /// need the headroom, or wanted directions get purged at restart.
    pub subspace: Option<usize>,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { tol: 1e-10, seed: 0, max_restarts: 600, subspace: None }
    }
}

struct Basis<'a> {
    v: Vec<Vec<C64>>,
    locked: &'a [Vec<C64>],
}

impl Basis<'_> {
    fn project_locked(&self, w: &mut [C64]) {
        for _ in 0..2 {
            for d in self.locked {
                let c = dot(d, w);
                w.iter_mut().zip(d).for_each(|(x, y)| *x -= c * y);
            }
        }
    }

    /// Two passes of classical Gram-Schmidt against the first `j + 1` vectors.
    fn orthogonalize(&self, w: &mut [C64], j: usize) -> Vec<C64> {
        let mut h = vec![ZERO; j + 1];
        for _ in 0..2 {
            self.project_locked(w);
            for (i, hi) in h.iter_mut().enumerate() {
                let c = dot(&self.v[i], w);
                *hi += c;
                w.iter_mut().zip(&self.v[i]).for_each(|(x, y)| *x -= c * y);
            }
        }
        h
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// The `k` largest-modulus eigenpairs of `op` restricted to the orthogonal
/// complement of `trivial`. When `trivial` is given it must be a unit left
/// and right eigenvector; it is returned as the first pair.
pub fn top_k(op: &dyn LinearMap, k: usize, trivial: Option<&[C64]>, opts: &KrylovOptions) -> Result<SpectralDecomposition> {
    let n = op.dim();
    let locked: Vec<Vec<C64>> = trivial.map(|t| vec![t.to_vec()]).unwrap_or_default();
    let n_eff = n - locked.len();
    if k == 0 || k >= n_eff {
        return Err(Error::invalid(format!("top-k needs 0 < k < {n_eff}, got {k}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let m = opts.subspace.unwrap_or((3 * k).max(k + 40)).min(n_eff);
    if m <= k {
        return Err(Error::invalid(format!("subspace size {m} must exceed k = {k}")));
    }
    let p = (k + (m - k) / 2).max(k + 1).min(m - 1).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis = Basis { v: Vec::with_capacity(m + 1), locked: &locked };
    let mut v0 = random_vector(&mut rng, n);
    basis.project_locked(&mut v0);
    let s = 1.0 / norm(&v0);
    v0.iter_mut().for_each(|x| *x *= s);
    basis.v.push(v0);
    let mut h = Mat::<C64>::zeros(m + 1, m);
    let mut l = 0;
    let mut w = vec![ZERO; n];
    let mut last_res = Vec::new();
    for restart in 0..=opts.max_restarts {
        for j in l..m {
            op.apply(&basis.v[j], &mut w);
            let hj = basis.orthogonalize(&mut w, j);
            let mut beta = norm(&w);
            let scale = hj.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(beta);
            if beta <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
                // invariant subspace found; continue with a fresh direction
                w = random_vector(&mut rng, n);
                basis.orthogonalize(&mut w, j);
                let nw = norm(&w);
                w.iter_mut().for_each(|x| *x /= nw);
                beta = 0.0;
            } else {
                w.iter_mut().for_each(|x| *x /= beta);
            }
            for (i, &x) in hj.iter().enumerate() {
                h[(i, j)] = x;
            }
            h[(j + 1, j)] = C64::new(beta, 0.0);
            basis.v.push(std::mem::replace(&mut w, vec![ZERO; n]));
        }
        let hm = Mat::from_fn(m, m, |i, j| h[(i, j)]);
        let mut sch = schur(&hm)?;
        let theta = sch.eigenvalues();
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| modulus_order(&theta[a], &theta[b]));
        let mut select = vec![false; m];
        for &i in &idx[..p] {
            select[i] = true;
        }
        sch.reorder_to_front(&select);
        let theta = sch.eigenvalues();
        let y = sch.triangular_eigenvectors();
        // b^T Z, the coupling of the Schur vectors to the next basis vector
        let bz: Vec<C64> = (0..m).map(|c| (0..m).map(|r| h[(m, r)] * sch.z[(r, c)]).sum()).collect();
        let mut lead: Vec<usize> = (0..p).collect();
        lead.sort_by(|&a, &b| modulus_order(&theta[a], &theta[b]));
        lead.truncate(k);
        let res: Vec<f64> = lead.iter().map(|&i| (0..=i).map(|r| bz[r] * y[(r, i)]).sum::<C64>().norm()).collect();
        let converged = res.iter().all(|&r| r <= opts.tol);
        if converged {
            return Ok(assemble(op, trivial, &basis.v[..m], &sch.z, &y, &theta, &lead, &res));
        }
        last_res = res;
        if restart == opts.max_restarts {
            break;
        }
        // truncate to the leading p Schur vectors
        let vz: Vec<Vec<C64>> = (0..p)
            .map(|c| {
                let mut out = vec![ZERO; n];
                for r in 0..m {
                    let z = sch.z[(r, c)];
                    out.iter_mut().zip(&basis.v[r]).for_each(|(o, v)| *o += z * v);
                }
                out
            })
            .collect();
        let next = basis.v.pop().expect("basis has m + 1 vectors");
        basis.v = vz;
        basis.v.push(next);
        let mut hn = Mat::<C64>::zeros(m + 1, m);
        for c in 0..p {
            for r in 0..p {
                hn[(r, c)] = sch.t[(r, c)];
            }
            hn[(p, c)] = bz[c];
        }
        h = hn;
        l = p;
    }
    let worst = last_res.iter().copied().fold(0.0, f64::max);
    Err(Error::Solver(format!(
        "Krylov-Schur did not converge after {} restarts; worst residual {worst:.3e} > tol {:.1e}",
        opts.max_restarts, opts.tol
    )))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    op: &dyn LinearMap,
    trivial: Option<&[C64]>,
    v: &[Vec<C64>],
    z: &Mat<C64>,
    y: &Mat<C64>,
    theta: &[C64],
    lead: &[usize],
    res: &[f64],
) -> SpectralDecomposition {
    let n = op.dim();
    let m = v.len();
    let mut pairs = Vec::with_capacity(lead.len() + 1);
    if let Some(t) = trivial {
        let mut mt = vec![ZERO; n];
        op.apply(t, &mut mt);
        let lam = dot(t, &mt);
        let r: Vec<C64> = mt.iter().zip(t).map(|(a, b)| a - lam * b).collect();
        pairs.push(EigenPair {
            value: lam,
            sector: "trivial",
            trivial: true,
            residual: Some(norm(&r)),
            right: Some(t.to_vec()),
            left: Some(t.to_vec()),
        });
    }
    for (&i, &r) in lead.iter().zip(res) {
        let zy: Vec<C64> = (0..m).map(|row| (0..=i).map(|c| z[(row, c)] * y[(c, i)]).sum()).collect();
        let mut x = vec![ZERO; n];
        for (row, c) in zy.iter().enumerate() {
            x.iter_mut().zip(&v[row]).for_each(|(o, b)| *o += c * b);
        }
        let s = 1.0 / norm(&x);
        x.iter_mut().for_each(|c| *c *= s);
        pairs.push(EigenPair { value: theta[i], sector: "krylov", trivial: false, residual: Some(r), right: Some(x), left: None });
    }
    let max_residual = pairs.iter().filter_map(|p| p.residual).fold(0.0, f64::max);
    SpectralDecomposition { dim: n, pairs, max_residual: Some(max_residual), biorthogonality: None, discarded_imag: 0.0 }
}

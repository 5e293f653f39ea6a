//! Eigenvalues and modes of the channels, plus the scalar diagnostics built
//! on them (entangling power, ring radii, parameter sweeps).

pub mod entangle;
pub mod krylov;
pub mod rings;
pub mod sweep;

use crate::koopman::KoopmanChannel;
use crate::linalg::blocks::{hermitian_sectors, Sector, SparseVec};
use crate::linalg::{norm, LinearMap, DENSE_LIMIT};
use crate::quantum::factored::FactoredChannel;
use crate::quantum::channel::trivial_mode;
use crate::quantum::ChannelMatrix;
use crate::{Error, Result, C64};
use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

pub use krylov::{top_k, KrylovOptions};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Which eigenvectors to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeRequest {
    None,
    /// Right and left modes of the trivial pair plus the `k` leading others.
    Leading(usize),
    All,
}

impl ModeRequest {
    fn count(self) -> usize {
        match self {
            ModeRequest::None => 0,
            ModeRequest::Leading(k) => k + 1,
            ModeRequest::All => usize::MAX,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: C64,
    pub sector: &'static str,
    pub trivial: bool,
    /// `|M x - lambda x|` for the unit right mode, when it was computed.
    pub residual: Option<f64>,
    pub right: Option<Vec<C64>>,
    /// Normalised so that `<left|right> = 1`.
    pub left: Option<Vec<C64>>,
}

/// Eigenpairs sorted by descending modulus with the trivial pair first.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub dim: usize,
    pub pairs: Vec<EigenPair>,
    /// Largest `|M x - lambda x| / |M|_F` over the pairs with vectors.
    pub max_residual: Option<f64>,
    /// Largest `|<L_i|R_j> - delta_ij|`.
    pub biorthogonality: Option<f64>,
    /// Largest imaginary part dropped when forming real symmetry blocks.
    pub discarded_imag: f64,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &EigenPair> {
        self.pairs.iter().filter(|p| !p.trivial)
    }

    pub fn nontrivial_values(&self) -> Vec<C64> {
        self.nontrivial().map(|p| p.value).collect()
    }

    /// Largest-modulus eigenvalue other than the trivial one.
    pub fn lambda1(&self) -> Option<C64> {
        self.nontrivial().next().map(|p| p.value)
    }
}

/// Descending modulus, compared on a 1e-12 grid so that conjugate pairs tie;
/// ties put the positive imaginary part first.
pub(crate) fn modulus_order(a: &C64, b: &C64) -> std::cmp::Ordering {
    let q = |z: &C64| (z.norm() * 1e12).round();
    q(b).total_cmp(&q(a)).then(b.im.total_cmp(&a.im)).then(b.re.total_cmp(&a.re))
}

// Householder deflation of a known unit vector c that is both a left and a
// right eigenvector: with H e0 = c the matrix H R H is block diagonal and
// its trailing block carries the rest of the spectrum.
struct Deflation {
    w: Vec<f64>,
    active: bool,
}

impl Deflation {
    fn new(mut c: Vec<f64>) -> Self {
        let nc = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.iter_mut().for_each(|x| *x /= nc);
        if c[0] < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        let mut w: Vec<f64> = c.iter().map(|x| -x).collect();
        w[0] += 1.0;
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw < 1e-15 {
            return Self { w, active: false };
        }
        w.iter_mut().for_each(|x| *x /= nw);
        Self { w, active: true }
    }

    /// Trailing block of `H R H`, `H = I - 2 w w^T`.
    fn reduce(&self, r: &Mat<f64>) -> Mat<f64> {
        let d = r.nrows();
        if !self.active {
            return Mat::from_fn(d - 1, d - 1, |i, j| r[(i + 1, j + 1)]);
        }
        let w = &self.w;
        let rw: Vec<f64> = (0..d).map(|i| (0..d).map(|j| r[(i, j)] * w[j]).sum()).collect();
        let wr: Vec<f64> = (0..d).map(|j| (0..d).map(|i| w[i] * r[(i, j)]).sum()).collect();
        let wrw: f64 = (0..d).map(|i| w[i] * rw[i]).sum();
        Mat::from_fn(d - 1, d - 1, |i, j| {
            let (i, j) = (i + 1, j + 1);
            r[(i, j)] - 2.0 * w[i] * wr[j] - 2.0 * rw[i] * w[j] + 4.0 * wrw * w[i] * w[j]
        })
    }

    /// `H [0; x]`
    fn expand(&self, x: &[C64]) -> Vec<C64> {
        let mut y = Vec::with_capacity(x.len() + 1);
        y.push(ZERO);
        y.extend_from_slice(x);
        if self.active {
            let s: C64 = self.w.iter().zip(&y).map(|(w, v)| v * *w).sum();
            for (v, w) in y.iter_mut().zip(&self.w) {
                *v -= s * (2.0 * w);
            }
        }
        y
    }
}

struct BlockResult {
    sector: usize,
    values: Vec<C64>,
    vectors: Option<(Mat<C64>, Mat<C64>)>,
    residuals: Vec<f64>,
    biorth: f64,
    deflation: Option<Deflation>,
    scale: f64,
    imag: f64,
}

fn solve_block(
    idx: usize,
    sector: &Sector,
    r: Mat<f64>,
    imag: f64,
    trivial: Option<&[C64]>,
    vectors: bool,
) -> Result<BlockResult> {
    let mut deflation = None;
    let mut r = r;
    if let Some(t) = trivial {
        let c: Vec<f64> = sector.basis.iter().map(|v| v.dot(t).re).collect();
        if c.iter().map(|x| x * x).sum::<f64>() > 0.5 {
            let d = Deflation::new(c);
            r = d.reduce(&r);
            deflation = Some(d);
        }
    }
    let d = r.nrows();
    let scale = {
        let mut s = 0.0;
        for j in 0..d {
            for i in 0..d {
                s += r[(i, j)] * r[(i, j)];
            }
        }
        s.sqrt().max(f64::MIN_POSITIVE)
    };
    if d == 0 {
        return Ok(BlockResult {
            sector: idx,
            values: vec![],
            vectors: None,
            residuals: vec![],
            biorth: 0.0,
            deflation,
            scale,
            imag,
        });
    }
    let fail = |e: faer::linalg::evd::EvdError| Error::Solver(format!("eigensolver failed in sector {}: {e:?}", sector.label));
    if !vectors {
        let values = r.eigenvalues().map_err(fail)?;
        return Ok(BlockResult { sector: idx, values, vectors: None, residuals: vec![], biorth: 0.0, deflation, scale, imag });
    }
    let eig = r.eigen().map_err(fail)?;
    let values: Vec<C64> = (0..d).map(|i| eig.S()[i]).collect();
    let mut x = eig.U().to_owned();
    for j in 0..d {
        let nrm: f64 = (0..d).map(|i| x[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..d {
            x[(i, j)] /= nrm;
        }
    }
    let rc = Mat::from_fn(d, d, |i, j| C64::new(r[(i, j)], 0.0));
    let rx = &rc * &x;
    let residuals: Vec<f64> = (0..d)
        .map(|j| (0..d).map(|i| (rx[(i, j)] - values[j] * x[(i, j)]).norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let xinv = x.partial_piv_lu().inverse();
    let g = &xinv * &x;
    let mut biorth = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            let want = if i == j { 1.0 } else { 0.0 };
            biorth = biorth.max((g[(i, j)] - want).norm());
        }
    }
    Ok(BlockResult { sector: idx, values, vectors: Some((x, xinv)), residuals, biorth, deflation, scale, imag })
}

/// Spectrum of an operator that is block diagonal over `sectors`, each block
/// real in its basis. `apply(v, out)` adds `M v` into a zeroed `out`.
/// When `trivial` is given it must be a unit left and right eigenvector;
/// it is removed exactly and reported as the first pair.
pub fn block_spectrum<F>(
    sectors: &[Sector],
    apply: F,
    trivial: Option<&[C64]>,
    modes: ModeRequest,
) -> Result<SpectralDecomposition>
where
    F: Fn(&SparseVec, &mut [C64]) + Sync,
{
    let dim = sectors.first().map(|s| s.dim).unwrap_or(0);
    let total: usize = sectors.iter().map(|s| s.basis.len()).sum();
    if total > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { dim: total, limit: DENSE_LIMIT });
    }
    let want_vectors = modes != ModeRequest::None;
    let mut blocks = Vec::with_capacity(sectors.len());
    for (i, s) in sectors.iter().enumerate() {
        let (r, imag) = s.reduce(&apply);
        blocks.push(solve_block(i, s, r, imag, trivial, want_vectors)?);
    }
    let scale = blocks.iter().map(|b| b.scale * b.scale).sum::<f64>().sqrt();

    let mut order: Vec<(usize, usize)> =
        blocks.iter().enumerate().flat_map(|(b, r)| (0..r.values.len()).map(move |i| (b, i))).collect();
    order.sort_by(|a, b| modulus_order(&blocks[a.0].values[a.1], &blocks[b.0].values[b.1]));

    let mut pairs = Vec::with_capacity(order.len() + 1);
    let mut max_res = None::<f64>;
    if let Some(t) = trivial {
        let tsec = blocks.iter().position(|b| b.deflation.is_some());
        let mut y = vec![ZERO; dim];
        let tv = SparseVec(t.iter().enumerate().filter(|e| e.1.norm() > 0.0).map(|(i, c)| (i, *c)).collect());
        apply(&tv, &mut y);
        let lam = crate::linalg::dot(t, &y);
        let res = y.iter().zip(t).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt();
        if want_vectors {
            max_res = Some(res / scale.max(1.0));
        }
        pairs.push(EigenPair {
            value: lam,
            sector: tsec.map(|i| sectors[i].label).unwrap_or("trivial"),
            trivial: true,
            residual: Some(res),
            right: want_vectors.then(|| t.to_vec()),
            left: want_vectors.then(|| t.to_vec()),
        });
    }
    let keep = modes.count().saturating_sub(1);
    let lifted: Vec<(Option<Vec<C64>>, Option<Vec<C64>>)> = order
        .par_iter()
        .enumerate()
        .map(|(rank, &(b, i))| {
            let blk = &blocks[b];
            match (&blk.vectors, rank < keep) {
                (Some((x, xinv)), true) => {
                    let d = x.nrows();
                    let xr: Vec<C64> = (0..d).map(|k| x[(k, i)]).collect();
                    let xl: Vec<C64> = (0..d).map(|k| xinv[(i, k)].conj()).collect();
                    let (xr, xl) = match &blk.deflation {
                        Some(df) => (df.expand(&xr), df.expand(&xl)),
                        None => (xr, xl),
                    };
                    let s = &sectors[blk.sector];
                    (Some(s.lift(&xr)), Some(s.lift(&xl)))
                }
                _ => (None, None),
            }
        })
        .collect();
    for (&(b, i), (right, left)) in order.iter().zip(lifted) {
        let blk = &blocks[b];
        let residual = blk.residuals.get(i).copied();
        if let Some(r) = residual {
            max_res = Some(max_res.unwrap_or(0.0).max(r / scale.max(1.0)));
        }
        pairs.push(EigenPair { value: blk.values[i], sector: sectors[blk.sector].label, trivial: false, residual, right, left });
    }
    Ok(SpectralDecomposition {
        dim,
        pairs,
        max_residual: max_res,
        biorthogonality: want_vectors.then(|| blocks.iter().map(|b| b.biorth).fold(0.0, f64::max)),
        discarded_imag: blocks.iter().map(|b| b.imag).fold(0.0, f64::max),
    })
}

/// Full spectrum of a general complex matrix, no symmetry used.
pub fn dense_spectrum(m: &Mat<C64>, modes: ModeRequest) -> Result<SpectralDecomposition> {
    let d = m.nrows();
    if d > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge { dim: d, limit: DENSE_LIMIT });
    }
    let fail = |e: faer::linalg::evd::EvdError| Error::Solver(format!("dense eigensolver failed: {e:?}"));
    if modes == ModeRequest::None {
        let mut v = m.eigenvalues().map_err(fail)?;
        v.sort_by(modulus_order);
        let pairs = v
            .into_iter()
            .map(|value| EigenPair { value, sector: "full", trivial: false, residual: None, right: None, left: None })
            .collect();
        return Ok(SpectralDecomposition { dim: d, pairs, max_residual: None, biorthogonality: None, discarded_imag: 0.0 });
    }
    let eig = m.eigen().map_err(fail)?;
    let mut x = eig.U().to_owned();
    for j in 0..d {
        let nrm: f64 = (0..d).map(|i| x[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..d {
            x[(i, j)] /= nrm;
        }
    }
    let xinv = x.partial_piv_lu().inverse();
    let g = &xinv * &x;
    let mut biorth = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            biorth = biorth.max((g[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm());
        }
    }
    let scale = crate::linalg::frobenius(m).max(1.0);
    let mx = m * &x;
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| modulus_order(&eig.S()[a], &eig.S()[b]));
    let keep = modes.count();
    let mut max_res = 0.0f64;
    let pairs = idx
        .iter()
        .enumerate()
        .map(|(rank, &j)| {
            let lam = eig.S()[j];
            let res = (0..d).map(|i| (mx[(i, j)] - lam * x[(i, j)]).norm_sqr()).sum::<f64>().sqrt();
            max_res = max_res.max(res / scale);
            let (right, left) = if rank < keep {
                (Some((0..d).map(|i| x[(i, j)]).collect()), Some((0..d).map(|i| xinv[(j, i)].conj()).collect()))
            } else {
                (None, None)
            };
            EigenPair { value: lam, sector: "full", trivial: false, residual: Some(res), right, left }
        })
        .collect();
    Ok(SpectralDecomposition { dim: d, pairs, max_residual: Some(max_res), biorthogonality: Some(biorth), discarded_imag: 0.0 })
}

/// Classical channel spectrum through its two parity blocks.
pub fn koopman_spectrum(k: &KoopmanChannel, modes: ModeRequest) -> Result<SpectralDecomposition> {
    let t = k.trivial_mode();
    block_spectrum(&k.parity_sectors(), |v, out| k.apply_sparse(v, out), Some(&t), modes)
}

/// Quantum channel spectrum on Hermitian operators of definite parity.
pub fn factored_spectrum(f: &FactoredChannel, modes: ModeRequest) -> Result<SpectralDecomposition> {
    let t = f.trivial_mode();
    block_spectrum(&f.sectors(), |v, out| f.apply_sparse(v, out), Some(&t), modes)
}

/// Spectrum of a dense channel from an arbitrary bipartite unitary. Such a
/// channel preserves Hermiticity, so it is real on the Hermitian operators.
pub fn channel_spectrum(m: &ChannelMatrix, modes: ModeRequest) -> Result<SpectralDecomposition> {
    let t = trivial_mode(m.n);
    let apply = |v: &SparseVec, out: &mut [C64]| {
        for &(j, c) in &v.0 {
            let col = m.matrix.col(j);
            for (i, o) in out.iter_mut().enumerate() {
                *o += col[i] * c;
            }
        }
    };
    block_spectrum(&hermitian_sectors(m.n, None), apply, Some(&t), modes)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TaggedEigenvalue {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub real: bool,
    /// Index of the conjugate partner for complex values.
    pub pair: Option<usize>,
    pub unpaired: bool,
}

/// Sorts by descending modulus, tags real values and matches complex ones
/// to their nearest conjugate.
pub fn sort_and_pair(eigs: &[C64], pair_tol: f64) -> Vec<TaggedEigenvalue> {
    let mut v = eigs.to_vec();
    v.sort_by(modulus_order);
    let real: Vec<bool> = v.iter().map(|z| z.im.abs() < 1e-10 * z.norm().max(1.0)).collect();
    let mut pair = vec![None; v.len()];
    for i in 0..v.len() {
        if real[i] || pair[i].is_some() {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..v.len() {
            if j == i || real[j] || pair[j].is_some() {
                continue;
            }
            let d = (v[j] - v[i].conj()).norm();
            if best.is_none_or(|b| d < b.1) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d <= pair_tol * v[i].norm().max(1.0) {
                pair[i] = Some(j);
                pair[j] = Some(i);
            }
        }
    }
    v.iter()
        .enumerate()
        .map(|(i, z)| TaggedEigenvalue {
            index: i,
            re: z.re,
            im: z.im,
            modulus: z.norm(),
            real: real[i],
            pair: pair[i],
            unpaired: !real[i] && pair[i].is_none(),
        })
        .collect()
}

/// Matches each reference value to the nearest unused computed one and
/// returns `(reference, matched, distance)`.
pub fn nearest_match(reference: &[C64], computed: &[C64]) -> Vec<(C64, C64, f64)> {
    let mut used = vec![false; computed.len()];
    reference
        .iter()
        .map(|&r| {
            let mut best = (usize::MAX, f64::INFINITY);
            for (j, &c) in computed.iter().enumerate() {
                let d = (c - r).norm();
                if !used[j] && d < best.1 {
                    best = (j, d);
                }
            }
            if best.0 == usize::MAX {
                return (r, C64::new(f64::NAN, f64::NAN), f64::INFINITY);
            }
            used[best.0] = true;
            (r, computed[best.0], best.1)
        })
        .collect()
}

/// Residual `|M x - lambda x|` for a mode of a matrix-free operator.
pub fn mode_residual(op: &dyn LinearMap, lambda: C64, x: &[C64]) -> f64 {
    let mut y = vec![ZERO; x.len()];
    op.apply(x, &mut y);
    let r: Vec<C64> = y.iter().zip(x).map(|(a, b)| a - lambda * b).collect();
    norm(&r) / norm(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::bessel_j0;
    use crate::quantum::channel::channel_from_unitary;
    use crate::quantum::coupled_unitary;
    use crate::SystemParams;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_real(n: usize, seed: u64) -> Mat<C64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0))
    }

    #[test]
    fn unitary_channel_lies_on_circle() {
        let f = FactoredChannel::build(8, &SystemParams::new(2.0, 0.0, 0.0).unwrap()).unwrap();
        let s = factored_spectrum(&f, ModeRequest::None).unwrap();
        assert_eq!(s.pairs.len(), 64);
        assert!(s.pairs.iter().all(|p| (p.value.norm() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn koopman_free_rotor_has_bessel_values() {
        let k = KoopmanChannel::build(6, 0.0, 0.1).unwrap();
        let s = koopman_spectrum(&k, ModeRequest::None).unwrap();
        let ev = s.eigenvalues();
        for m in 0..=6 {
            let want = bessel_j0(0.1 * m as f64);
            assert!(ev.iter().any(|z| (z - want).norm() < 1e-12), "J0(0.1 * {m})");
        }
        assert!((s.lambda1().unwrap().re - bessel_j0(0.1)).abs() < 1e-12);
    }

    #[test]
    fn block_spectrum_matches_dense_with_modes() {
        let p = SystemParams::new(2.0, 1.0, 0.5).unwrap();
        let generic = channel_from_unitary(&coupled_unitary(6, &p).unwrap()).unwrap();
        let dense = dense_spectrum(&generic.matrix, ModeRequest::All).unwrap();
        let fast = factored_spectrum(&FactoredChannel::build(6, &p).unwrap(), ModeRequest::All).unwrap();
        let a = dense.eigenvalues();
        let b = fast.eigenvalues();
        for (r, _, d) in nearest_match(&a, &b) {
            assert!(d < 1e-10, "{r}");
        }
        assert!(fast.pairs[0].trivial && (fast.pairs[0].value - 1.0).norm() < 1e-12);
        assert!(fast.max_residual.unwrap() < 1e-10);
        assert!(fast.biorthogonality.unwrap() < 1e-8);
        assert!(fast.discarded_imag < 1e-12);
        // lifted modes are eigenvectors of the full channel, left modes dual
        for pair in fast.pairs.iter().take(12) {
            let x = pair.right.as_ref().unwrap();
            assert!(mode_residual(&generic, pair.value, x) < 1e-10);
            let l = pair.left.as_ref().unwrap();
            assert!((crate::linalg::dot(l, x) - 1.0).norm() < 1e-9);
            let mut y = vec![ZERO; 36];
            crate::linalg::dense_matvec(&generic.matrix.adjoint().to_owned(), l, &mut y);
            let r: f64 = y.iter().zip(l).map(|(a, b)| (a - pair.value.conj() * b).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-9 * norm(l));
        }
        let g = channel_spectrum(&generic, ModeRequest::None).unwrap();
        for (r, _, d) in nearest_match(&g.eigenvalues(), &b) {
            assert!(d < 1e-10, "{r}");
        }
    }

    #[test]
    fn cross_sector_biorthogonality() {
        let p = SystemParams::new(3.0, 1.0, 0.4).unwrap();
        let s = factored_spectrum(&FactoredChannel::build(6, &p).unwrap(), ModeRequest::All).unwrap();
        let mut worst = 0.0f64;
        for (i, a) in s.pairs.iter().enumerate() {
            for (j, b) in s.pairs.iter().enumerate() {
                let z = crate::linalg::dot(a.left.as_ref().unwrap(), b.right.as_ref().unwrap());
                worst = worst.max((z - if i == j { 1.0 } else { 0.0 }).norm());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn pairing_tags() {
        let t = sort_and_pair(&[C64::new(0.5, 0.0), C64::new(0.9, 0.0)], 1e-10);
        assert!(t.iter().all(|e| e.real) && t[0].modulus == 0.9);
        let ev = dense_spectrum(&random_real(30, 1), ModeRequest::None).unwrap().eigenvalues();
        assert!(sort_and_pair(&ev, 1e-10).iter().all(|e| !e.unpaired));
        let odd = sort_and_pair(&[C64::new(0.1, 0.5)], 1e-10);
        assert!(odd[0].unpaired);
    }

    #[test]
    fn krylov_agrees_with_dense() {
        let p = SystemParams::new(2.0, 2.0, 0.1).unwrap();
        let f = FactoredChannel::build(40, &p).unwrap();
        let dense = factored_spectrum(&f, ModeRequest::None).unwrap();
        let t = f.trivial_mode();
        let opts = KrylovOptions { tol: 1e-11, seed: 7, ..Default::default() };
        let kr = top_k(&f, 10, Some(&t), &opts).unwrap();
        assert!(kr.pairs[0].trivial);
        let want: Vec<C64> = dense.nontrivial_values()[..10].to_vec();
        let got = kr.nontrivial_values();
        for (r, _, d) in nearest_match(&got, &want) {
            assert!(d < 1e-8, "{r} {d}");
        }
        for pr in kr.nontrivial() {
            assert!(mode_residual(&f, pr.value, pr.right.as_ref().unwrap()) < 1e-10);
        }
        let again = top_k(&f, 10, Some(&t), &opts).unwrap();
        assert_eq!(again.eigenvalues(), kr.eigenvalues());
    }

    #[test]
    fn krylov_on_koopman_and_bad_input() {
        let k = KoopmanChannel::build(12, 2.0, 0.3).unwrap();
        let dense = koopman_spectrum(&k, ModeRequest::None).unwrap();
        let t = k.trivial_mode();
        let kr = top_k(&k, 6, Some(&t), &KrylovOptions::default()).unwrap();
        for (r, _, d) in nearest_match(&kr.nontrivial_values(), &dense.nontrivial_values()[..8]) {
            assert!(d < 1e-8, "{r}");
        }
        assert!(top_k(&k, 0, None, &KrylovOptions::default()).is_err());
        assert!(top_k(&k, k.dimension(), None, &KrylovOptions::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn real_matrices_pair_up(seed in 0u64..1000, n in 4usize..24) {
            let ev = dense_spectrum(&random_real(n, seed), ModeRequest::None).unwrap().eigenvalues();
            prop_assert!(sort_and_pair(&ev, 1e-9).iter().all(|e| !e.unpaired));
        }

        #[test]
        fn dense_modes_are_biorthogonal(seed in 0u64..1000) {
            let s = dense_spectrum(&random_real(16, seed), ModeRequest::All).unwrap();
            prop_assert!(s.biorthogonality.unwrap() < 1e-8);
            prop_assert!(s.max_residual.unwrap() < 1e-10);
        }
    }
}

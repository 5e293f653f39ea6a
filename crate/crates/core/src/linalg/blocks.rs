//! Symmetry-adapted real bases and the reduced matrices they produce.
//!
//! An operator that commutes with an involution and preserves a real
//! structure (real vectors for the Koopman matrix, Hermitian matrices for the
//! quantum channel) is block diagonal with real blocks in such a basis. The
//! blocks have the same spectrum as the full operator at a fraction of the cost.

use crate::C64;
use faer::Mat;
use rayon::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

/// A vector with few nonzero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec(pub Vec<(usize, C64)>);

impl SparseVec {
    pub fn to_dense(&self, dim: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for &(i, c) in &self.0 {
            v[i] += c;
        }
        v
    }

    /// `<self|y>`
    pub fn dot(&self, y: &[C64]) -> C64 {
        self.0.iter().map(|&(i, c)| c.conj() * y[i]).sum()
    }
}

/// One symmetry sector: an orthonormal list of sparse basis vectors.
#[derive(Clone, Debug)]
pub struct Sector {
    pub label: &'static str,
    pub dim: usize,
    pub basis: Vec<SparseVec>,
}

impl Sector {
    /// Real reduced matrix `R[a][b] = <v_a| A v_b>`, with `apply(v, out)`
    /// writing `A v` into a zeroed buffer. Returns the matrix and the largest
    /// imaginary part that was discarded.
    pub fn reduce<F>(&self, apply: F) -> (Mat<f64>, f64)
    where
        F: Fn(&SparseVec, &mut [C64]) + Sync,
    {
        let d = self.basis.len();
        let cols: Vec<(Vec<f64>, f64)> = self
            .basis
            .par_iter()
            .map(|vb| {
                let mut y = vec![C64::new(0.0, 0.0); self.dim];
                apply(vb, &mut y);
                let mut col = Vec::with_capacity(d);
                let mut im = 0.0f64;
                for va in &self.basis {
                    let z = va.dot(&y);
                    im = im.max(z.im.abs());
                    col.push(z.re);
                }
                (col, im)
            })
            .collect();
        let im = cols.iter().map(|c| c.1).fold(0.0, f64::max);
        (Mat::from_fn(d, d, |a, b| cols[b].0[a]), im)
    }

    /// Maps block coordinates back to the full space.
    pub fn lift(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (v, &c) in self.basis.iter().zip(x) {
            for &(i, e) in &v.0 {
                out[i] += e * c;
            }
        }
        out
    }
}

/// Even and odd sectors of a real vector space under an index involution.
pub fn real_parity_sectors(dim: usize, involution: impl Fn(usize) -> usize) -> Vec<Sector> {
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for i in 0..dim {
        let j = involution(i);
        if j == i {
            even.push(SparseVec(vec![(i, C64::new(1.0, 0.0))]));
        } else if i < j {
            let c = C64::new(FRAC_1_SQRT_2, 0.0);
            even.push(SparseVec(vec![(i, c), (j, c)]));
            odd.push(SparseVec(vec![(i, c), (j, -c)]));
        }
    }
    vec![
        Sector { label: "even", dim, basis: even },
        Sector { label: "odd", dim, basis: odd },
    ]
}

/// Orthonormal bases of the Hermitian N x N matrices (row-vectorised), split
/// by their sign under `X -> P X P` for the index involution `perm`. When
/// `perm` is `None` a single Hermitian sector is returned.
pub fn hermitian_sectors(n: usize, perm: Option<&dyn Fn(usize) -> usize>) -> Vec<Sector> {
    let dim = n * n;
    let one = C64::new(1.0, 0.0);
    let i1 = C64::new(0.0, 1.0);
    // Hermitian units for the pair k <= l
    let units = |k: usize, l: usize| -> Vec<Vec<(usize, C64)>> {
        if k == l {
            vec![vec![(k * n + k, one)]]
        } else {
            vec![vec![(k * n + l, one), (l * n + k, one)], vec![(k * n + l, i1), (l * n + k, -i1)]]
        }
    };
    let Some(p) = perm else {
        let mut basis = Vec::with_capacity(dim);
        for k in 0..n {
            for l in k..n {
                for u in units(k, l) {
                    basis.push(normalize(u));
                }
            }
        }
        return vec![Sector { label: "hermitian", dim, basis }];
    };
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for k in 0..n {
        for l in k..n {
            let (pk, pl) = (p(k), p(l));
            let (a, b) = if pk <= pl { (pk, pl) } else { (pl, pk) };
            // visit each orbit once, from its smallest member
            if (a, b) < (k, l) {
                continue;
            }
            for u in units(k, l) {
                let image: Vec<(usize, C64)> =
                    u.iter().map(|&(idx, c)| (p(idx / n) * n + p(idx % n), c)).collect();
                for (s, out) in [(1.0, &mut even), (-1.0, &mut odd)] {
                    let mut v = u.clone();
                    v.extend(image.iter().map(|&(i, c)| (i, c * s)));
                    let v = compress(v);
                    if !v.is_empty() {
                        out.push(normalize(v));
                    }
                }
            }
        }
    }
    vec![
        Sector { label: "hermitian-even", dim, basis: even },
        Sector { label: "hermitian-odd", dim, basis: odd },
    ]
}

fn compress(mut v: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|e| e.1.norm() > 1e-14);
    out
}

fn normalize(v: Vec<(usize, C64)>) -> SparseVec {
    let nrm = v.iter().map(|e| e.1.norm_sqr()).sum::<f64>().sqrt();
    SparseVec(v.into_iter().map(|(i, c)| (i, c / nrm)).collect())
}

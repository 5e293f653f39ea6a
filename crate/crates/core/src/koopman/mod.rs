//! Truncated Fourier-basis Koopman matrix of the reduced one-rotor channel.
//!
//! Basis functions are `exp(2 pi i (m q + n p))` with `|m|, |n| <= M`, stored at
//! index `(m + M)(2M + 1) + (n + M)`. The channel element is
//! `<m',n'|K|m,n> = J0(b n) J_{m-m'}(alpha n') delta(n', m + n)`; entries that
//! would leave the window are dropped.

pub mod oracle;

use crate::bessel::{bessel_j_orders, signed_lookup};
use crate::linalg::blocks::{real_parity_sectors, Sector, SparseVec};
use crate::linalg::{LinearMap, DENSE_LIMIT};
use crate::{bessel, Error, Result, C64};
use faer::Mat;

/// Closed-form channel element for modes `(m', n')` and `(m, n)`.
pub fn koopman_element(alpha: f64, b: f64, target: (i64, i64), mode: (i64, i64)) -> f64 {
    let (mp, np) = target;
    let (m, n) = mode;
    if np != m + n {
        return 0.0;
    }
    bessel::bessel_j0(b * n as f64) * bessel::bessel_j(m - mp, alpha * np as f64)
}

#[derive(Clone, Debug)]
pub struct KoopmanChannel {
    pub cutoff: usize,
    pub alpha: f64,
    pub b: f64,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    row_vals: Vec<f64>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    col_vals: Vec<f64>,
}

impl KoopmanChannel {
    pub fn build(cutoff: usize, alpha: f64, b: f64) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::invalid("Fourier cutoff M must be at least 1"));
        }
        if !(alpha.is_finite() && b.is_finite()) || b < 0.0 {
            return Err(Error::invalid("alpha must be finite and b >= 0"));
        }
        let mm = cutoff as i64;
        let side = 2 * cutoff + 1;
        let j0: Vec<f64> = (0..=cutoff).map(|n| bessel::bessel_j0(b * n as f64)).collect();
        let mut trip: Vec<(usize, usize, f64)> = Vec::new();
        for np in -mm..=mm {
            let table = bessel_j_orders(2 * cutoff, alpha * np as f64);
            for m in -mm..=mm {
                let n = np - m;
                if n.abs() > mm {
                    continue;
                }
                let col = ((m + mm) as usize) * side + (n + mm) as usize;
                let a = j0[n.unsigned_abs() as usize];
                for mp in -mm..=mm {
                    let v = a * signed_lookup(&table, m - mp);
                    if v != 0.0 {
                        let row = ((mp + mm) as usize) * side + (np + mm) as usize;
                        trip.push((row, col, v));
                    }
                }
            }
        }
        let dim = side * side;
        let (row_ptr, col_idx, row_vals) = compress(dim, &mut trip, false);
        let (col_ptr, row_idx, col_vals) = compress(dim, &mut trip, true);
        Ok(Self { cutoff, alpha, b, row_ptr, col_idx, row_vals, col_ptr, row_idx, col_vals })
    }

    #[inline]
    pub fn side(&self) -> usize {
        2 * self.cutoff + 1
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.side() * self.side()
    }

    pub fn nnz(&self) -> usize {
        self.row_vals.len()
    }

    pub fn index(&self, m: i64, n: i64) -> Option<usize> {
        let mm = self.cutoff as i64;
        if m.abs() > mm || n.abs() > mm {
            return None;
        }
        Some(((m + mm) as usize) * self.side() + (n + mm) as usize)
    }

    pub fn mode_of(&self, idx: usize) -> (i64, i64) {
        let mm = self.cutoff as i64;
        ((idx / self.side()) as i64 - mm, (idx % self.side()) as i64 - mm)
    }

    /// Stored matrix element, zero outside the sparsity pattern.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let r = &self.col_idx[self.row_ptr[row]..self.row_ptr[row + 1]];
        match r.binary_search(&col) {
            Ok(k) => self.row_vals[self.row_ptr[row] + k],
            Err(_) => 0.0,
        }
    }

    /// Nonzeros in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.dimension() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push((r, self.col_idx[k], self.row_vals[k]));
            }
        }
        out
    }

    /// Writes column-combination `K v` for a sparse input.
    pub fn apply_sparse(&self, v: &SparseVec, out: &mut [C64]) {
        for &(j, c) in &v.0 {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                out[self.row_idx[k]] += c * self.col_vals[k];
            }
        }
    }

    pub fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.row_vals[k] * x[self.col_idx[k]];
            }
            *yr = s;
        }
    }

    /// Transposed product, used for left modes.
    pub fn apply_transpose(&self, x: &[C64], y: &mut [C64]) {
        for (c, yc) in y.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                s += x[self.row_idx[k]] * self.col_vals[k];
            }
            *yc = s;
        }
    }

    pub fn to_dense(&self) -> Result<Mat<f64>> {
        let d = self.dimension();
        if d > DENSE_LIMIT {
            return Err(Error::DimensionTooLarge { dim: d, limit: DENSE_LIMIT });
        }
        let mut m = Mat::<f64>::zeros(d, d);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        Ok(m)
    }

    /// The constant function, a left and right eigenvector with eigenvalue one.
    pub fn trivial_mode(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dimension()];
        v[self.index(0, 0).unwrap()] = C64::new(1.0, 0.0);
        v
    }

    /// Even and odd sectors under `(m, n) -> (-m, -n)`.
    pub fn parity_sectors(&self) -> Vec<Sector> {
        let d = self.dimension();
        real_parity_sectors(d, move |i| d - 1 - i)
    }

    /// Fourier coefficients of `x -> exp(2 pi i (m q + n p))`.
    pub fn fourier_mode(&self, m: i64, n: i64) -> Result<Vec<C64>> {
        let idx = self
            .index(m, n)
            .ok_or_else(|| Error::invalid(format!("mode ({m}, {n}) lies outside the cutoff")))?;
        let mut v = vec![C64::new(0.0, 0.0); self.dimension()];
        v[idx] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// `<g| K^t |f>` for `t = 0..=t_max`.
    pub fn correlation(&self, f: &[C64], g: &[C64], t_max: usize) -> Vec<C64> {
        let mut cur = f.to_vec();
        let mut next = vec![C64::new(0.0, 0.0); cur.len()];
        let mut out = Vec::with_capacity(t_max + 1);
        out.push(crate::linalg::dot(g, &cur));
        for _ in 0..t_max {
            self.apply(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            out.push(crate::linalg::dot(g, &cur));
        }
        out
    }
}

impl LinearMap for KoopmanChannel {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += x[self.col_idx[k]] * self.row_vals[k];
            }
            *yr = s;
        }
    }
}

type Csr = (Vec<usize>, Vec<usize>, Vec<f64>);

fn compress(dim: usize, trip: &mut [(usize, usize, f64)], by_col: bool) -> Csr {
    if by_col {
        trip.sort_unstable_by_key(|t| (t.1, t.0));
    } else {
        trip.sort_unstable_by_key(|t| (t.0, t.1));
    }
    let mut ptr = vec![0usize; dim + 1];
    for t in trip.iter() {
        ptr[if by_col { t.1 } else { t.0 } + 1] += 1;
    }
    for i in 0..dim {
        ptr[i + 1] += ptr[i];
    }
    let idx = trip.iter().map(|t| if by_col { t.0 } else { t.1 }).collect();
    let vals = trip.iter().map(|t| t.2).collect();
    (ptr, idx, vals)
}

//! Complex Schur decomposition for the small projected matrices of the
//! Krylov-Schur iteration, with reordering of the triangular factor.

use crate::{Error, Result, C64};
use faer::Mat;

/// `A = Z T Z^H` with `T` upper triangular and `Z` unitary.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: Mat<C64>,
    pub z: Mat<C64>,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Rotation `[[c, s], [-conj(s), c]]` that maps `(x, y)` to `(r, 0)`.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn zeroing(x: C64, y: C64) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        if ax == 0.0 {
            return Self { c: 0.0, s: y.conj() / ay };
        }
        let r = ax.hypot(ay);
        Self { c: ax / r, s: (x / ax) * y.conj() / r }
    }

    /// rows k, k+1 of `m` for columns in `cols`
    fn rows(&self, m: &mut Mat<C64>, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(k, j)];
            let b = m[(k + 1, j)];
            m[(k, j)] = a * self.c + self.s * b;
            m[(k + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// right-multiplies columns k, k+1 of `m` by G^H for rows in `rows`
    fn cols(&self, m: &mut Mat<C64>, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let a = m[(i, k)];
            let b = m[(i, k + 1)];
            m[(i, k)] = a * self.c + b * self.s.conj();
            m[(i, k + 1)] = -a * self.s + b * self.c;
        }
    }
}

fn hessenberg(a: &Mat<C64>) -> (Mat<C64>, Mat<C64>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut z = super::identity(n);
    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha;
        let vn: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vn == 0.0 {
            continue;
        }
        // H <- (I - 2 v v^H / vn) H (I - 2 v v^H / vn)
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            let f = s * (2.0 / vn);
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * f;
            }
        }
        for m in [&mut h, &mut z] {
            for i in 0..n {
                let s: C64 = v.iter().enumerate().map(|(r, vr)| m[(i, k + 1 + r)] * vr).sum();
                let f = s * (2.0 / vn);
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= f * vr.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, z)
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Complex Schur form of a square matrix by shifted QR on its Hessenberg form.
pub fn schur(a: &Mat<C64>) -> Result<Schur> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let (mut t, mut z) = hessenberg(a);
    if n < 2 {
        return Ok(Schur { t, z });
    }
    let scale = super::frobenius(a).max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = t[(l, l - 1)].norm();
            let diag = t[(l, l)].norm() + t[(l - 1, l - 1)].norm();
            if sub <= eps * diag.max(1e-3 * scale) {
                t[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 200 * n {
            return Err(Error::Solver("Schur QR iteration did not converge".into()));
        }
        let mu = if iter % 11 == 10 {
            t[(hi, hi)] + C64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        let mut x = t[(l, l)] - mu;
        let mut y = t[(l + 1, l)];
        for k in l..hi {
            let g = Givens::zeroing(x, y);
            let c0 = if k > l { k - 1 } else { l };
            g.rows(&mut t, k, c0..n);
            let r1 = (k + 2).min(hi) + 1;
            g.cols(&mut t, k, 0..r1);
            g.cols(&mut z, k, 0..n);
            if k > l {
                t[(k + 1, k - 1)] = ZERO;
            }
            if k + 1 < hi {
                x = t[(k + 1, k)];
                y = t[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t, z })
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Swaps the diagonal entries `k` and `k+1` of `T`.
    fn swap(&mut self, k: usize) {
        let n = self.t.nrows();
        let a = self.t[(k, k)];
        let b = self.t[(k + 1, k + 1)];
        let c = self.t[(k, k + 1)];
        let g = Givens::zeroing(c, b - a);
        g.rows(&mut self.t, k, k..n);
        g.cols(&mut self.t, k, 0..k + 2);
        g.cols(&mut self.z, k, 0..n);
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = b;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Moves the selected diagonal entries to the leading block, keeping
    /// their relative order.
    pub fn reorder_to_front(&mut self, select: &[bool]) {
        let mut sel = select.to_vec();
        let mut pos = 0;
        for i in 0..sel.len() {
            if sel[i] {
                for j in (pos..i).rev() {
                    self.swap(j);
                    sel.swap(j, j + 1);
                }
                pos += 1;
            }
        }
    }

    /// Unit eigenvectors of `T` (columns), by back substitution.
    pub fn triangular_eigenvectors(&self) -> Mat<C64> {
        let n = self.t.nrows();
        let tiny = f64::EPSILON * super::frobenius(&self.t).max(f64::MIN_POSITIVE);
        let mut y = Mat::<C64>::zeros(n, n);
        for j in 0..n {
            y[(j, j)] = C64::new(1.0, 0.0);
            let lam = self.t[(j, j)];
            for i in (0..j).rev() {
                let s: C64 = (i + 1..=j).map(|k| self.t[(i, k)] * y[(k, j)]).sum();
                let mut d = self.t[(i, i)] - lam;
                if d.norm() < tiny {
                    d = C64::new(tiny, 0.0);
                }
                y[(i, j)] = -s / d;
            }
            let nrm: f64 = (0..=j).map(|i| y[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..=j {
                y[(i, j)] /= nrm;
            }
        }
        y
    }
}

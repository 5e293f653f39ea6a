//! Small dense helpers shared by the channel builders and the solvers.

pub mod blocks;
pub mod schur;

use crate::C64;
use faer::Mat;

/// Largest matrix dimension the dense eigensolvers will accept.
pub const DENSE_LIMIT: usize = 10_000;

/// A linear map on `C^dim`, applied out of place.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearMap for Mat<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        dense_matvec(self, x, y);
    }
}

pub fn dense_matvec(m: &Mat<C64>, x: &[C64], y: &mut [C64]) {
    y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
    for (j, &xj) in x.iter().enumerate() {
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
}

/// `sum conj(a_i) b_i`
#[inline]
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius(m: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn max_abs_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut d = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            d = d.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    d
}

pub fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Kronecker product, `(A (x) B)[(i,a),(j,b)] = A[i,j] B[a,b]` with index `i*nb + a`.
pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Row-wise vectorisation, `<ij|A> = A[i,j]`.
pub fn vec_row(a: &Mat<C64>) -> Vec<C64> {
    let n = a.ncols();
    (0..a.nrows() * n).map(|k| a[(k / n, k % n)]).collect()
}

/// Inverse of [`vec_row`] for a square `n x n` matrix.
pub fn unvec(v: &[C64], n: usize) -> Mat<C64> {
    assert_eq!(v.len(), n * n);
    Mat::from_fn(n, n, |i, j| v[i * n + j])
}

pub fn adjoint(a: &Mat<C64>) -> Mat<C64> {
    a.adjoint().to_owned()
}

pub fn is_hermitian(a: &Mat<C64>, tol: f64) -> bool {
    max_abs_diff(a, &adjoint(a)) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cmat(n: usize, vals: &[f64]) -> Mat<C64> {
        Mat::from_fn(n, n, |i, j| C64::new(vals[2 * (i * n + j)], vals[2 * (i * n + j) + 1]))
    }

    proptest! {
        #[test]
        fn vec_kron_identity(va in proptest::collection::vec(-1.0f64..1.0, 18),
                             vb in proptest::collection::vec(-1.0f64..1.0, 18),
                             vx in proptest::collection::vec(-1.0f64..1.0, 18)) {
            // vec(A X B^T) = (A (x) B) vec(X) for row-wise vectorisation
            let (a, b, x) = (cmat(3, &va), cmat(3, &vb), cmat(3, &vx));
            let lhs = vec_row(&(&(&a * &x) * b.transpose()));
            let k = kron(&a, &b);
            let mut rhs = vec![C64::new(0.0, 0.0); 9];
            dense_matvec(&k, &vec_row(&x), &mut rhs);
            for (l, r) in lhs.iter().zip(&rhs) {
                prop_assert!((l - r).norm() < 1e-12);
            }
            prop_assert!(max_abs_diff(&unvec(&vec_row(&x), 3), &x) == 0.0);
        }
    }
}

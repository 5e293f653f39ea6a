//! Realignments and partial transposes of bipartite N^2 x N^2 matrices.
//!
//! With `<i a|U|j b>` the element in row `i*N + a`, column `j*N + b`:
//!
//! ```text
//! <b a|U^R1|j i> = <i a|U|j b>      <i j|U^R2|a b> = <i a|U|j b>
//! <j a|U^T1|i b> = <i a|U|j b>      <i b|U^T2|j a> = <i a|U|j b>
//! ```
//!
//! Every map is a permutation of entries and an involution.

use crate::C64;
use faer::Mat;

fn permute(u: &Mat<C64>, n: usize, target: impl Fn(usize, usize, usize, usize) -> (usize, usize)) -> Mat<C64> {
    assert_eq!(u.nrows(), n * n);
    assert_eq!(u.ncols(), n * n);
    let mut out = Mat::<C64>::zeros(n * n, n * n);
    for j in 0..n {
        for b in 0..n {
            let col = u.col(j * n + b);
            for i in 0..n {
                for a in 0..n {
                    let (r, c) = target(i, a, j, b);
                    out[(r, c)] = col[i * n + a];
                }
            }
        }
    }
    out
}

pub fn realign_r1(u: &Mat<C64>, n: usize) -> Mat<C64> {
    permute(u, n, |i, a, j, b| (b * n + a, j * n + i))
}

pub fn realign_r2(u: &Mat<C64>, n: usize) -> Mat<C64> {
    permute(u, n, |i, a, j, b| (i * n + j, a * n + b))
}

pub fn partial_transpose_t1(u: &Mat<C64>, n: usize) -> Mat<C64> {
    permute(u, n, |i, a, j, b| (j * n + a, i * n + b))
}

pub fn partial_transpose_t2(u: &Mat<C64>, n: usize) -> Mat<C64> {
    permute(u, n, |i, a, j, b| (i * n + b, j * n + a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, kron, max_abs_diff};
    use proptest::prelude::*;

    fn mat(nn: usize, v: &[f64]) -> Mat<C64> {
        Mat::from_fn(nn, nn, |r, c| C64::new(v[2 * (r * nn + c)], v[2 * (r * nn + c) + 1]))
    }

    #[test]
    fn realignment_of_product_operator() {
        // (A (x) B)^R2 = vec(A) vec(B)^T
        let a = mat(3, &(0..18).map(|k| (k as f64 * 0.37).sin()).collect::<Vec<_>>());
        let b = mat(3, &(0..18).map(|k| (k as f64 * 0.91).cos()).collect::<Vec<_>>());
        let r2 = realign_r2(&kron(&a, &b), 3);
        for r in 0..9 {
            for c in 0..9 {
                assert!((r2[(r, c)] - a[(r / 3, r % 3)] * b[(c / 3, c % 3)]).norm() < 1e-15);
            }
        }
        // partial transposes of a product act factor-wise
        let t2 = partial_transpose_t2(&kron(&a, &b), 3);
        assert!(max_abs_diff(&t2, &kron(&a, &b.transpose().to_owned())) < 1e-15);
        let t1 = partial_transpose_t1(&kron(&a, &b), 3);
        assert!(max_abs_diff(&t1, &kron(&a.transpose().to_owned(), &b)) < 1e-15);
    }

    #[test]
    fn swap_is_dual_unitary() {
        // S^R2 = S^T is unitary while the swap's partial transpose is not
        let s = crate::quantum::swap_operator(4).matrix;
        let r1 = realign_r1(&s, 4);
        let rr = &r1 * r1.adjoint();
        assert!(max_abs_diff(&rr, &crate::linalg::identity(16)) < 1e-15);
    }

    proptest! {
        #[test]
        fn involutions_preserving_norm(v in proptest::collection::vec(-1.0f64..1.0, 2 * 81)) {
            let u = mat(9, &v);
            for f in [realign_r1, realign_r2, partial_transpose_t1, partial_transpose_t2] {
                let once = f(&u, 3);
                prop_assert!((frobenius(&once) - frobenius(&u)).abs() < 1e-12);
                prop_assert!(max_abs_diff(&f(&once, 3), &u) == 0.0);
            }
        }
    }
}

//! Kraus and Choi forms of the channel and the standard CPTP diagnostics.

use super::channel::ChannelMatrix;
use super::UnitaryOperator;
use crate::linalg::{identity, kron, max_abs_diff};
use crate::{Error, Result, C64};
use faer::{Mat, Side};
use serde::Serialize;

/// Kraus operators of `a -> Tr_2[U^dagger (a (x) 1/N) U] = sum K^dagger a K`,
/// `K_(a,b)[i, j] = <i a|U|j b> / sqrt(N)`.
pub fn kraus_operators(u: &UnitaryOperator) -> Result<Vec<Mat<C64>>> {
    if !u.bipartite {
        return Err(Error::invalid("Kraus form needs a bipartite unitary"));
    }
    let n = u.n;
    let s = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            out.push(Mat::from_fn(n, n, |i, j| u.matrix[(i * n + a, j * n + b)] * s));
        }
    }
    Ok(out)
}

/// `max(|sum K^dagger K - 1|, |sum K K^dagger - 1|)`, elementwise.
pub fn kraus_completeness(kraus: &[Mat<C64>]) -> f64 {
    let n = kraus[0].nrows();
    let mut kk = Mat::<C64>::zeros(n, n);
    let mut kd = Mat::<C64>::zeros(n, n);
    for k in kraus {
        kk += k.adjoint() * k;
        kd += k * k.adjoint();
    }
    let id = identity(n);
    max_abs_diff(&kk, &id).max(max_abs_diff(&kd, &id))
}

/// `sum K^dagger (x) K^T`, the superoperator of the Kraus form.
pub fn channel_from_kraus(kraus: &[Mat<C64>]) -> ChannelMatrix {
    let n = kraus[0].nrows();
    let mut m = Mat::<C64>::zeros(n * n, n * n);
    for k in kraus {
        m += kron(&k.adjoint().to_owned(), &k.transpose().to_owned());
    }
    ChannelMatrix { n, matrix: m, params: None }
}

/// Choi matrix `sum_kl |k><l| (x) M(|k><l|)`.
pub fn choi_matrix(m: &ChannelMatrix) -> Mat<C64> {
    let n = m.n;
    Mat::from_fn(n * n, n * n, |r, c| {
        let (k, kp) = (r / n, r % n);
        let (l, lp) = (c / n, c % n);
        m.matrix[(kp * n + lp, k * n + l)]
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CptpReport {
    pub choi_min_eigenvalue: f64,
    pub choi_hermiticity: f64,
    pub unitality_residual: f64,
    pub kraus_completeness: Option<f64>,
}

pub fn cptp_report(m: &ChannelMatrix, kraus: Option<&[Mat<C64>]>) -> Result<CptpReport> {
    let choi = choi_matrix(m);
    let herm = max_abs_diff(&choi, &choi.adjoint().to_owned());
    let sym = Mat::from_fn(choi.nrows(), choi.ncols(), |i, j| (choi[(i, j)] + choi[(j, i)].conj()) * 0.5);
    let ev = sym
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Solver(format!("Choi eigenvalues: {e:?}")))?;
    Ok(CptpReport {
        choi_min_eigenvalue: ev.iter().copied().fold(f64::INFINITY, f64::min),
        choi_hermiticity: herm,
        unitality_residual: m.unitality_residual(),
        kraus_completeness: kraus.map(kraus_completeness),
    })
}

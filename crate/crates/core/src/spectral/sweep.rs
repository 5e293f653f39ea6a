//! Largest non-trivial eigenvalue as a function of the kick strength.

use super::{factored_spectrum, koopman_spectrum, top_k, KrylovOptions, ModeRequest, SpectralDecomposition};
use crate::koopman::KoopmanChannel;
use crate::quantum::factored::FactoredChannel;
use crate::{Error, Result, SystemParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Classical,
    Quantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Full spectrum of the symmetry blocks.
    Dense,
    /// Krylov-Schur on the matrix-free operator.
    Krylov,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Dense => "dense",
            Backend::Krylov => "krylov",
        }
    }
}

/// Leading eigenvalues of the classical (`size` = Fourier cutoff M) or the
/// quantum (`size` = N) channel, trivial pair first.
pub fn leading_spectrum(
    kind: ChannelKind,
    size: usize,
    params: &SystemParams,
    backend: Backend,
    k: usize,
    opts: &KrylovOptions,
) -> Result<SpectralDecomposition> {
    match (kind, backend) {
        (ChannelKind::Classical, Backend::Dense) => {
            let ch = KoopmanChannel::build(size, params.alpha1, params.b)?;
            koopman_spectrum(&ch, ModeRequest::Leading(k))
        }
        (ChannelKind::Classical, Backend::Krylov) => {
            let ch = KoopmanChannel::build(size, params.alpha1, params.b)?;
            let t = ch.trivial_mode();
            top_k(&ch, k, Some(&t), opts)
        }
        (ChannelKind::Quantum, Backend::Dense) => {
            let ch = FactoredChannel::build(size, params)?;
            factored_spectrum(&ch, ModeRequest::Leading(k))
        }
        (ChannelKind::Quantum, Backend::Krylov) => {
            let ch = FactoredChannel::build(size, params)?;
            let t = ch.trivial_mode();
            top_k(&ch, k, Some(&t), opts)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSample {
    pub alpha: f64,
    pub lambda1_abs: f64,
    pub lambda1_re: f64,
    pub lambda1_im: f64,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSeries {
    pub kind: ChannelKind,
    pub backend: Backend,
    pub size: usize,
    pub b: f64,
    pub samples: Vec<SweepSample>,
}

impl SweepSeries {
    pub fn at(&self, alpha: f64) -> Option<&SweepSample> {
        self.samples.iter().find(|s| (s.alpha - alpha).abs() < 1e-12)
    }
}

/// `|lambda_1|` over a strictly increasing grid of `alpha` (both rotors kicked
/// equally). Failed samples carry the error text and a NaN value.
pub fn lambda1_sweep(
    alphas: &[f64],
    b: f64,
    size: usize,
    kind: ChannelKind,
    backend: Backend,
    opts: &KrylovOptions,
) -> Result<SweepSeries> {
    if alphas.is_empty() {
        return Err(Error::invalid("alpha grid is empty"));
    }
    if alphas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("alpha grid must be strictly increasing"));
    }
    SystemParams::new(alphas[0], alphas[0], b)?;
    let samples = alphas.par_iter().map(|&alpha| sweep_sample(kind, size, alpha, b, backend, opts)).collect();
    Ok(SweepSeries { kind, backend, size, b, samples })
}

/// One sweep point with both rotors kicked by `alpha`. Errors are carried in
/// the sample instead of being returned.
pub fn sweep_sample(kind: ChannelKind, size: usize, alpha: f64, b: f64, backend: Backend, opts: &KrylovOptions) -> SweepSample {
    let out = SystemParams::new(alpha, alpha, b).and_then(|p| leading_spectrum(kind, size, &p, backend, 1, opts));
    match out.as_ref().map(|s| s.pairs.iter().find(|p| !p.trivial).cloned()) {
        Ok(Some(p)) => SweepSample {
            alpha,
            lambda1_abs: p.value.norm(),
            lambda1_re: p.value.re,
            lambda1_im: p.value.im,
            residual: p.residual.unwrap_or(f64::NAN),
            error: None,
        },
        Ok(None) => failed(alpha, "no non-trivial eigenvalue".into()),
        Err(e) => failed(alpha, e.to_string()),
    }
}

fn failed(alpha: f64, msg: String) -> SweepSample {
    let nan = f64::NAN;
    SweepSample { alpha, lambda1_abs: nan, lambda1_re: nan, lambda1_im: nan, residual: nan, error: Some(msg) }
}

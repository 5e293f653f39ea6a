//! CSV tables: eigenvalues, sweeps and ring radii.

use crate::spectral::sweep::SweepSample;
use crate::spectral::TaggedEigenvalue;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EigenvalueRow {
    pub run_id: String,
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub real_flag: bool,
    /// Index of the conjugate partner; empty for real values.
    pub pair_index: Option<usize>,
}

impl EigenvalueRow {
    pub fn from_tagged(run_id: &str, t: &TaggedEigenvalue) -> Self {
        Self { run_id: run_id.into(), index: t.index, re: t.re, im: t.im, modulus: t.modulus, real_flag: t.real, pair_index: t.pair }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub lambda1_abs: f64,
    pub backend: String,
    pub residual: f64,
    /// Empty unless the sample failed.
    pub error: String,
}

impl SweepRow {
    pub fn from_sample(s: &SweepSample, backend: &str) -> Self {
        Self {
            alpha: s.alpha,
            lambda1_abs: s.lambda1_abs,
            backend: backend.into(),
            residual: s.residual,
            error: s.error.clone().unwrap_or_default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RadiiRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub b: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub ep: f64,
    pub ep_bessel: f64,
}

pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(format!("CSV: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(format!("CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    super::write_atomic(path, to_csv_string(rows)?.as_bytes())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Format(format!("CSV {}: {e}", path.display())))?;
    r.deserialize().map(|x| x.map_err(|e| Error::Format(format!("CSV {}: {e}", path.display())))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sort_and_pair;
    use crate::C64;

    #[test]
    fn eigenvalue_schema() {
        let t = sort_and_pair(&[C64::new(1.0, 0.0), C64::new(0.1, 0.5), C64::new(0.1, -0.5)], 1e-10);
        let rows: Vec<EigenvalueRow> = t.iter().map(|x| EigenvalueRow::from_tagged("abc", x)).collect();
        let s = to_csv_string(&rows).unwrap();
        assert!(s.starts_with("run_id,index,re,im,modulus,real_flag,pair_index\n"));
        assert!(s.contains("abc,0,1.0,0.0,1.0,true,\n"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        write_csv(&p, &rows).unwrap();
        assert_eq!(read_csv::<EigenvalueRow>(&p).unwrap(), rows);
    }

    #[test]
    fn radii_and_sweep_headers() {
        let r = RadiiRow { n: 60, b: 0.1, r_in: 0.4, r_out: 0.6, ep: 0.5, ep_bessel: 0.5 };
        assert!(to_csv_string(&[r]).unwrap().starts_with("N,b,r_in,r_out,ep,ep_bessel\n"));
        let s = SweepRow { alpha: 1.0, lambda1_abs: 0.9, backend: "dense".into(), residual: 1e-12, error: String::new() };
        assert!(to_csv_string(&[s]).unwrap().starts_with("alpha,lambda1_abs,backend,residual,error\n"));
    }
}

//! Coordinate-list text export of the Koopman channel: one JSON header line,
//! then `row col value` per nonzero.

use crate::koopman::KoopmanChannel;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CooHeader {
    #[serde(rename = "M")]
    pub m: usize,
    pub alpha: f64,
    pub b: f64,
    pub dim: usize,
    pub nnz: usize,
    /// How rows, columns and indices map to Fourier modes.
    pub axis: String,
}

pub fn koopman_coo_string(k: &KoopmanChannel) -> String {
    let header = CooHeader {
        m: k.cutoff,
        alpha: k.alpha,
        b: k.b,
        dim: k.dimension(),
        nnz: k.nnz(),
        axis: "row = target mode (m', n'), col = source mode (m, n), index = (m + M)(2M + 1) + (n + M)".into(),
    };
    let mut s = serde_json::to_string(&header).expect("header serialises");
    s.push('\n');
    for (r, c, v) in k.triplets() {
        s.push_str(&format!("{r} {c} {v:e}\n"));
    }
    s
}

pub fn write_koopman_coo(k: &KoopmanChannel, path: &Path) -> Result<()> {
    super::write_atomic(path, koopman_coo_string(k).as_bytes())
}

pub fn parse_coo(text: &str) -> Result<(CooHeader, Vec<(usize, usize, f64)>)> {
    let mut lines = text.lines();
    let header: CooHeader = serde_json::from_str(lines.next().ok_or_else(|| Error::Format("empty COO file".into()))?)?;
    let mut out = Vec::with_capacity(header.nnz);
    for (i, line) in lines.enumerate() {
        let bad = || Error::Format(format!("COO line {}: malformed entry", i + 2));
        let mut it = line.split_whitespace();
        let r = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let c = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let v = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        if r >= header.dim || c >= header.dim {
            return Err(bad());
        }
        out.push((r, c, v));
    }
    if out.len() != header.nnz {
        return Err(Error::Format(format!("COO header promises {} entries, found {}", header.nnz, out.len())));
    }
    Ok((header, out))
}

pub fn read_coo(path: &Path) -> Result<(CooHeader, Vec<(usize, usize, f64)>)> {
    parse_coo(&std::fs::read_to_string(path)?)
}

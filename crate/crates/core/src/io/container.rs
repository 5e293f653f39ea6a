//! Self-describing binary container for dense complex operators:
//! the magic `RCHANOP1`, a little-endian u64 header length, a JSON header and
//! the column-major complex128 payload (re, im pairs, little-endian).

use crate::quantum::CONVENTION_TAG;
use crate::{Error, Result, C64};
use faer::Mat;
use serde::{Deserialize, Serialize};
use std::path::Path;

const MAGIC: &[u8; 8] = b"RCHANOP1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ContainerHeader {
    pub shape: [usize; 2],
    /// What the indices label, e.g. `"row-vectorised N x N operators"`.
    pub basis: String,
    pub params: serde_json::Value,
    pub convention: String,
    pub order: String,
}

impl ContainerHeader {
    pub fn new(rows: usize, cols: usize, basis: impl Into<String>, params: serde_json::Value) -> Self {
        Self {
            shape: [rows, cols],
            basis: basis.into(),
            params,
            convention: CONVENTION_TAG.into(),
            order: "column-major".into(),
        }
    }
}

pub fn encode_operator(header: &ContainerHeader, m: &Mat<C64>) -> Result<Vec<u8>> {
    if header.shape != [m.nrows(), m.ncols()] {
        return Err(Error::invalid("header shape does not match the matrix"));
    }
    let json = serde_json::to_vec(header)?;
    let mut out = Vec::with_capacity(16 + json.len() + 16 * m.nrows() * m.ncols());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_operator(bytes: &[u8]) -> Result<(ContainerHeader, Mat<C64>)> {
    let bad = |msg: &str| Error::Format(format!("operator container: {msg}"));
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(bad("missing magic"));
    }
    let hl = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let hdr_end = 16usize.checked_add(hl).filter(|&e| e <= bytes.len()).ok_or_else(|| bad("truncated header"))?;
    let header: ContainerHeader = serde_json::from_slice(&bytes[16..hdr_end])?;
    if header.convention != CONVENTION_TAG {
        return Err(bad(&format!("unsupported convention {}", header.convention)));
    }
    let [r, c] = header.shape;
    let payload = &bytes[hdr_end..];
    if payload.len() != 16 * r * c {
        return Err(bad("payload size does not match shape"));
    }
    let f = |k: usize| f64::from_le_bytes(payload[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let m = Mat::from_fn(r, c, |i, j| {
        let k = 2 * (j * r + i);
        C64::new(f(k), f(k + 1))
    });
    Ok((header, m))
}

pub fn write_operator(path: &Path, header: &ContainerHeader, m: &Mat<C64>) -> Result<()> {
    super::write_atomic(path, &encode_operator(header, m)?)
}

pub fn read_operator(path: &Path) -> Result<(ContainerHeader, Mat<C64>)> {
    decode_operator(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::channel::channel_from_unitary;
    use crate::quantum::coupled_unitary;
    use crate::SystemParams;

    #[test]
    fn round_trip_is_exact() {
        let p = SystemParams::new(2.0, 1.0, 0.3).unwrap();
        let m = channel_from_unitary(&coupled_unitary(4, &p).unwrap()).unwrap();
        let h = ContainerHeader::new(16, 16, "row-vectorised N x N operators", serde_json::to_value(p).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        write_operator(&path, &h, &m.matrix).unwrap();
        let (h2, m2) = read_operator(&path).unwrap();
        assert_eq!(h, h2);
        assert_eq!(crate::linalg::max_abs_diff(&m.matrix, &m2), 0.0);
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.pop();
        assert!(decode_operator(&bytes).is_err());
        bytes[0] = b'X';
        assert!(decode_operator(&bytes).is_err());
    }
}

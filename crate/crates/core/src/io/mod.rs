//! On-disk formats: sparse channel text, the binary operator container and
//! the CSV tables written by the harness.

pub mod container;
pub mod coo;
pub mod tables;

pub(crate) use crate::phase_space::render::write_atomic;

/// Lowercase hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

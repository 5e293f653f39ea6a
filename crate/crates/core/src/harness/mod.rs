//! Batch harness behind the command-line tool: configuration, per-run output
//! directories, manifests and the subcommands.

pub mod cli;
pub mod commands;
pub mod config;

pub use config::RunConfig;

use crate::io::{sha256_hex, write_atomic};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Independent stream seed for `label`, derived from the run seed by hashing.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().expect("8 bytes"))
}

/// Deterministic identifier of a command applied to a configuration. The
/// output directory and the `--jobs` setting do not enter it.
pub fn run_id(command: &str, cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output.dir = PathBuf::new();
    let hex = sha256_hex(format!("{command}\n{}", c.to_toml_string()).as_bytes());
    hex[..16].to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub run_id: String,
    pub tool_version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub config: RunConfig,
    pub files: Vec<FileEntry>,
    pub status: String,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Output directory of one run and the files written into it so far.
pub struct RunContext {
    pub command: String,
    pub run_id: String,
    pub config: RunConfig,
    pub dir: PathBuf,
    started: f64,
    files: Vec<String>,
}

impl RunContext {
    /// Creates `<output.dir>/<command>-<run_id>`.
    pub fn create(command: &str, config: &RunConfig) -> Result<Self> {
        Self::create_keyed(command, "", config)
    }

    /// Like `create`, with command arguments outside the config folded into the id.
    pub fn create_keyed(command: &str, key: &str, config: &RunConfig) -> Result<Self> {
        let id = if key.is_empty() { run_id(command, config) } else { run_id(&format!("{command} {key}"), config) };
        let dir = config.output.dir.join(format!("{command}-{id}"));
        std::fs::create_dir_all(&dir)?;
        Ok(Self { command: command.into(), run_id: id, config: config.clone(), dir, started: now(), files: Vec::new() })
    }

    pub fn seed(&self, label: &str) -> u64 {
        derive_seed(self.config.solver.seed, label)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Records a file already written inside the run directory.
    pub fn record(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.into());
        }
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let p = self.path(name);
        write_atomic(&p, bytes)?;
        self.record(name);
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// Hashes every recorded file and writes `manifest.json` last.
    pub fn finish(self, status: &str) -> Result<RunManifest> {
        let mut files = Vec::with_capacity(self.files.len());
        let mut names = self.files.clone();
        names.sort();
        for name in names {
            let bytes = std::fs::read(self.dir.join(&name))?;
            files.push(FileEntry { path: name, sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 });
        }
        let m = RunManifest {
            command: self.command,
            run_id: self.run_id,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_unix: self.started,
            finished_unix: now(),
            config: self.config,
            files,
            status: status.into(),
        };
        write_atomic(&self.dir.join("manifest.json"), serde_json::to_string_pretty(&m)?.as_bytes())?;
        Ok(m)
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    serde_json::from_slice(&std::fs::read(path)?).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_and_ids() {
        assert_ne!(derive_seed(1, "krylov"), derive_seed(1, "oracle"));
        assert_ne!(derive_seed(1, "krylov"), derive_seed(2, "krylov"));
        assert_eq!(derive_seed(5, "x"), derive_seed(5, "x"));
        let mut c = RunConfig::default();
        let a = run_id("spectrum", &c);
        c.output.dir = "elsewhere".into();
        assert_eq!(a, run_id("spectrum", &c));
        assert_ne!(a, run_id("sweep", &c));
        c.system.b = 0.2;
        assert_ne!(a, run_id("spectrum", &c));
    }

    #[test]
    fn manifest_lists_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::default();
        c.output.dir = dir.path().into();
        let mut ctx = RunContext::create("spectrum", &c).unwrap();
        ctx.write("a.txt", b"abc").unwrap();
        let run_dir = ctx.dir.clone();
        let m = ctx.finish("ok").unwrap();
        assert_eq!(m.files[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        let back = read_manifest(&run_dir.join("manifest.json")).unwrap();
        assert_eq!(back.files, m.files);
    }
}

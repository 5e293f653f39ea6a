//! Run configuration: a TOML file with `[system] [task] [solver] [output]
//! [grid]` sections, dotted `KEY=VALUE` overrides and range validation.

use crate::phase_space::{Colormap, ModeSide, RasterFormat};
use crate::spectral::sweep::{Backend, ChannelKind};
use crate::spectral::KrylovOptions;
use crate::{Error, Result, SystemParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub kind: ChannelKind,
    /// Hilbert-space dimension of one rotor (quantum).
    #[serde(rename = "N")]
    pub n: usize,
    /// Fourier cutoff (classical): modes `-M..=M` in each direction.
    #[serde(rename = "M")]
    pub m: usize,
    pub alpha1: f64,
    /// Defaults to `alpha1`.
    pub alpha2: Option<f64>,
    pub b: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self { kind: ChannelKind::Quantum, n: 60, m: 45, alpha1: 2.0, alpha2: None, b: 0.1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TaskConfig {
    /// Kick strengths for `sweep`.
    pub alphas: Vec<f64>,
    /// Mode indices for `modes`; 0 is the trivial mode.
    pub modes: Vec<usize>,
    pub side: ModeSide,
    /// Also render the FTSE field next to the modes.
    pub ftse_companion: bool,
    /// Dimensions for `radii`; empty means `[system.N]`.
    pub sizes: Vec<usize>,
    /// Steps for `correlations`.
    pub t_max: usize,
    /// Fourier mode `(m, n)` used as the observable in `correlations`.
    pub observable: [i64; 2],
    /// Random initial conditions for the FTSE ensemble mean.
    pub ftse_samples: usize,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            alphas: Vec::new(),
            modes: vec![0, 1],
            side: ModeSide::Right,
            ftse_companion: false,
            sizes: Vec::new(),
            t_max: 20,
            observable: [1, 0],
            ftse_samples: 20_000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Number of non-trivial eigenvalues wanted from the Krylov backend.
    pub k: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_restarts: usize,
    /// Krylov basis size; unset picks the default.
    pub subspace: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = KrylovOptions::default();
        Self { backend: Backend::Dense, k: 8, tol: d.tol, seed: 0, max_restarts: d.max_restarts, subspace: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub raster: RasterFormat,
    pub colormap: Colormap,
    /// Write `q,p,value` CSV dumps next to rasters.
    pub field_csv: bool,
    /// Export the channel operator (COO text or binary container).
    pub operator: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), raster: RasterFormat::Pgm, colormap: Colormap::Gray, field_csv: false, operator: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    #[serde(rename = "G")]
    pub g: usize,
    /// FTSE time.
    pub t: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { g: 128, t: crate::classical::DEFAULT_FTSE_STEPS }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub task: TaskConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub grid: GridConfig,
}

fn config_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

/// Parses an override value as a TOML literal, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    #[derive(Deserialize)]
    struct Wrap {
        v: toml::Value,
    }
    toml::from_str::<Wrap>(&format!("v = {raw}")).map(|w| w.v).unwrap_or_else(|_| toml::Value::String(raw.into()))
}

/// Applies `section.key=value` to a parsed document.
pub fn apply_override(doc: &mut toml::Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_err(assignment, "override must look like KEY=VALUE"))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(key, "empty key segment"));
    }
    let mut cur = doc;
    for p in &parts[..parts.len() - 1] {
        let table = cur.as_table_mut().ok_or_else(|| config_err(key, "not a table"))?;
        cur = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = cur.as_table_mut().ok_or_else(|| config_err(key, "not a table"))?;
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

impl RunConfig {
    /// Parses TOML text, applies overrides and validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Value = toml::from_str(text).map_err(|e| config_err("<document>", e.message()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig = serde_path_to_error::deserialize(doc).map_err(|e| {
            let path = e.path().to_string();
            config_err(&path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| config_err(&p.display().to_string(), e.to_string()))?,
            None => String::new(),
        };
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.system;
        if s.n < 2 || s.n % 2 != 0 {
            return Err(config_err("system.N", format!("N must be even and >= 2, got {}", s.n)));
        }
        if s.m < 1 {
            return Err(config_err("system.M", "M must be >= 1"));
        }
        if !s.alpha1.is_finite() || !s.alpha2.unwrap_or(0.0).is_finite() {
            return Err(config_err("system.alpha1", "kick strengths must be finite"));
        }
        if !(s.b >= 0.0 && s.b.is_finite()) {
            return Err(config_err("system.b", format!("b must be finite and >= 0, got {}", s.b)));
        }
        let v = &self.solver;
        if v.seed > i64::MAX as u64 {
            return Err(config_err("solver.seed", "seed must fit in a signed 64-bit integer"));
        }
        if !(v.tol > 0.0 && v.tol.is_finite()) {
            return Err(config_err("solver.tol", "tol must be > 0"));
        }
        if v.k < 1 {
            return Err(config_err("solver.k", "k must be >= 1"));
        }
        if let Some(m) = v.subspace {
            if m < v.k + 2 {
                return Err(config_err("solver.subspace", "subspace must exceed k + 1"));
            }
        }
        if self.grid.g < 1 || self.grid.t < 1 {
            return Err(config_err("grid", "G and t must be >= 1"));
        }
        if let Some(i) = self.task.alphas.iter().position(|a| !a.is_finite()) {
            return Err(config_err(&format!("task.alphas[{i}]"), "not finite"));
        }
        if let Some(i) = self.task.sizes.iter().position(|&n| n < 2) {
            return Err(config_err(&format!("task.sizes[{i}]"), "sizes must be >= 2"));
        }
        Ok(())
    }

    pub fn params(&self) -> SystemParams {
        let s = &self.system;
        SystemParams { alpha1: s.alpha1, alpha2: s.alpha2.unwrap_or(s.alpha1), b: s.b }
    }

    /// `N` for the quantum channel, `M` for the classical one.
    pub fn size(&self) -> usize {
        match self.system.kind {
            ChannelKind::Quantum => self.system.n,
            ChannelKind::Classical => self.system.m,
        }
    }

    pub fn krylov(&self, seed: u64) -> KrylovOptions {
        KrylovOptions { tol: self.solver.tol, seed, max_restarts: self.solver.max_restarts, subspace: self.solver.subspace }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overrides_and_errors() {
        let c = RunConfig::from_toml_str(
            "[system]\nkind = \"classical\"\nM = 30\nalpha1 = 2.0\nb = 0.1\n",
            &["solver.backend=krylov".into(), "task.alphas=[0.0, 1.0]".into(), "output.dir=res".into()],
        )
        .unwrap();
        assert_eq!(c.system.kind, ChannelKind::Classical);
        assert_eq!(c.solver.backend, Backend::Krylov);
        assert_eq!(c.task.alphas, vec![0.0, 1.0]);
        assert_eq!(c.output.dir, PathBuf::from("res"));
        assert_eq!(c.params().alpha2, 2.0);

        let e = RunConfig::from_toml_str("[system]\nNN = 4\n", &[]).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path.starts_with("system")), "{e}");
        let e = RunConfig::from_toml_str("", &["system.N=7".into()]).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "system.N"));
        let e = RunConfig::from_toml_str("", &["solver.tol=0".into()]).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "solver.tol"));
        let e = RunConfig::from_toml_str("", &["solver.backend=lanczos".into()]).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "solver.backend"), "{e}");
        assert!(RunConfig::from_toml_str("", &["system.b=-1".into()]).is_err());
        assert!(RunConfig::from_toml_str("", &["noequals".into()]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..50, m in 1usize..60, a in -10.0f64..10.0, b in 0.0f64..3.0,
                      seed in 0u64..=i64::MAX as u64, alphas in proptest::collection::vec(-10.0f64..10.0, 0..5)) {
            let mut c = RunConfig::default();
            c.system.n = 2 * n;
            c.system.m = m;
            c.system.alpha1 = a;
            c.system.b = b;
            c.solver.seed = seed;
            c.task.alphas = alphas;
            let text = c.to_toml_string();
            let back = RunConfig::from_toml_str(&text, &[]).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.to_toml_string(), text);
        }
    }
}

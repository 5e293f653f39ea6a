//! Acceptance suite. Each criterion runs a set of named checks and reports a
//! single verdict; `Level::Fast` skips the three expensive ones.

mod criteria;

use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub(crate) fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub title: String,
    pub status: Status,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

impl Verdict {
    /// One line: status, id, title, elapsed time and the failing checks.
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        let mut s = format!("[{tag}] {:>2} {} ({:.1}s)", self.id, self.title, self.seconds);
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        if !failed.is_empty() {
            s.push_str(&format!(" failed: {}", failed.join(", ")));
        }
        if let Some(n) = &self.note {
            s.push_str(&format!(" [{n}]"));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub level: Level,
    pub seed: u64,
    /// Golden hash file; defaults to the one shipped with the crate.
    pub golden: Option<PathBuf>,
    /// Restrict the run to these criterion ids; empty runs everything.
    pub only: Vec<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { level: Level::Fast, seed: 0, golden: None, only: Vec::new() }
    }
}

pub fn default_golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join("hashes.json")
}

pub(crate) struct Spec {
    pub id: &'static str,
    pub title: &'static str,
    pub budget_seconds: f64,
    pub full_only: bool,
    pub run: fn(&VerifyOptions) -> crate::Result<Vec<Check>>,
}

/// Identifiers of every criterion, in suite order.
pub fn criterion_ids() -> Vec<&'static str> {
    criteria::SUITE.iter().map(|s| s.id).collect()
}

fn evaluate(spec: &Spec, opts: &VerifyOptions) -> Verdict {
    if spec.full_only && opts.level == Level::Fast {
        return Verdict {
            id: spec.id.into(),
            title: spec.title.into(),
            status: Status::Skip,
            seconds: 0.0,
            budget_seconds: spec.budget_seconds,
            checks: Vec::new(),
            note: Some("full level only".into()),
        };
    }
    let start = Instant::now();
    let mut checks = match (spec.run)(opts) {
        Ok(c) => c,
        Err(e) => vec![Check::new("run", false, e.to_string())],
    };
    let seconds = start.elapsed().as_secs_f64();
    checks.push(Check::new(
        "runtime",
        seconds <= spec.budget_seconds,
        format!("{seconds:.1}s of {:.0}s", spec.budget_seconds),
    ));
    let status = if checks.iter().all(|c| c.pass) { Status::Pass } else { Status::Fail };
    Verdict {
        id: spec.id.into(),
        title: spec.title.into(),
        status,
        seconds,
        budget_seconds: spec.budget_seconds,
        checks,
        note: None,
    }
}

/// Runs one criterion by id.
pub fn run_criterion(id: &str, opts: &VerifyOptions) -> Option<Verdict> {
    criteria::SUITE.iter().find(|s| s.id == id).map(|s| evaluate(s, opts))
}

/// Runs the suite in order, calling `report` after each criterion.
pub fn run_suite(opts: &VerifyOptions, mut report: impl FnMut(&Verdict)) -> Vec<Verdict> {
    criteria::SUITE
        .iter()
        .filter(|s| opts.only.is_empty() || opts.only.iter().any(|o| o == s.id))
        .map(|s| {
            let v = evaluate(s, opts);
            report(&v);
            v
        })
        .collect()
}

/// Renders the golden rasters into `dir` and returns their SHA-256 by name.
pub fn golden_hashes(dir: &std::path::Path) -> crate::Result<std::collections::BTreeMap<String, String>> {
    criteria::golden_hashes(dir)
}

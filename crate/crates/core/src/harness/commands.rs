//! The subcommands. Each takes a validated configuration, writes into its own
//! run directory and finishes with the manifest.

use super::{RunConfig, RunContext};
use crate::classical::{ftse_ensemble_mean, ftse_grid};
use crate::field::PhaseSpaceField;
use crate::io::tables::{to_csv_string, EigenvalueRow, RadiiRow, SweepRow};
use crate::io::{container, coo, sha256_hex};
use crate::koopman::KoopmanChannel;
use crate::linalg::LinearMap;
use crate::phase_space::{fourier_mode_field, husimi_mode, render_field, write_field_csv, ModeSide, RasterFormat};
use crate::quantum::channel::operator_correlation;
use crate::quantum::submatrix::{build_submatrix, fix_phase};
use crate::quantum::FactoredChannel;
use crate::spectral::entangle::{coupled_entangling_power, ep_bessel_asymptotic};
use crate::spectral::rings::ring_radii_factored;
use crate::spectral::sweep::{leading_spectrum, sweep_sample, Backend, ChannelKind, SweepSample};
use crate::spectral::{factored_spectrum, koopman_spectrum, sort_and_pair, ModeRequest, SpectralDecomposition};
use crate::verify::{self, Level, Status};
use crate::{Error, Result, C64};
use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

/// How a command ended when it did not return an error.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Ok,
    /// Some sweep rows failed; their error text is in the CSV.
    SolverFailures(usize),
    /// Some acceptance criteria failed.
    AcceptanceFailures(usize),
}

#[derive(Clone, Debug)]
pub struct CommandResult {
    pub outcome: Outcome,
    pub run_dir: PathBuf,
}

fn config_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

fn done(ctx: RunContext, outcome: Outcome) -> Result<CommandResult> {
    let status = match &outcome {
        Outcome::Ok => "ok".to_string(),
        Outcome::SolverFailures(n) => format!("{n} failed rows"),
        Outcome::AcceptanceFailures(n) => format!("{n} failed criteria"),
    };
    let run_dir = ctx.dir.clone();
    ctx.finish(&status)?;
    Ok(CommandResult { outcome, run_dir })
}

fn complex_json(z: C64) -> serde_json::Value {
    json!({"re": z.re, "im": z.im, "abs": z.norm()})
}

fn eigenvalue_rows(run_id: &str, spec: &SpectralDecomposition) -> Vec<EigenvalueRow> {
    // The trivial pair stays at index 0; the rest are sorted and paired.
    let mut rows = Vec::with_capacity(spec.pairs.len());
    let mut offset = 0;
    if let Some(t) = spec.pairs.iter().find(|p| p.trivial) {
        rows.push(EigenvalueRow {
            run_id: run_id.into(),
            index: 0,
            re: t.value.re,
            im: t.value.im,
            modulus: t.value.norm(),
            real_flag: true,
            pair_index: None,
        });
        offset = 1;
    }
    for t in sort_and_pair(&spec.nontrivial_values(), 1e-8) {
        let mut r = EigenvalueRow::from_tagged(run_id, &t);
        r.index += offset;
        r.pair_index = r.pair_index.map(|p| p + offset);
        rows.push(r);
    }
    rows
}

fn solve(cfg: &RunConfig, ctx: &RunContext, modes: ModeRequest) -> Result<SpectralDecomposition> {
    let params = cfg.params();
    let size = cfg.size();
    match cfg.solver.backend {
        Backend::Dense => match cfg.system.kind {
            ChannelKind::Classical => koopman_spectrum(&KoopmanChannel::build(size, params.alpha1, params.b)?, modes),
            ChannelKind::Quantum => factored_spectrum(&FactoredChannel::build(size, &params)?, modes),
        },
        Backend::Krylov => {
            let k = match modes {
                ModeRequest::Leading(k) => k.max(cfg.solver.k),
                _ => cfg.solver.k,
            };
            leading_spectrum(cfg.system.kind, size, &params, Backend::Krylov, k, &cfg.krylov(ctx.seed("krylov")))
        }
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<CommandResult> {
    let mut ctx = RunContext::create("spectrum", cfg)?;
    let spec = solve(cfg, &ctx, ModeRequest::None)?;
    let rows = eigenvalue_rows(&ctx.run_id, &spec);
    ctx.write("eigenvalues.csv", to_csv_string(&rows)?.as_bytes())?;

    let params = cfg.params();
    let mut summary = json!({
        "run_id": ctx.run_id,
        "kind": cfg.system.kind,
        "size": cfg.size(),
        "params": params,
        "backend": cfg.solver.backend,
        "count": spec.pairs.len(),
        "lambda1": spec.lambda1().map(complex_json),
        "max_residual": spec.max_residual,
        "discarded_imag": spec.discarded_imag,
    });
    match cfg.system.kind {
        ChannelKind::Quantum => {
            let f = FactoredChannel::build(cfg.system.n, &params)?;
            let r = ring_radii_factored(&f);
            let row = RadiiRow {
                n: cfg.system.n,
                b: params.b,
                r_in: r.r_in,
                r_out: r.r_o,
                ep: coupled_entangling_power(cfg.system.n, params.b),
                ep_bessel: ep_bessel_asymptotic(cfg.system.n, params.b)?.value,
            };
            ctx.write("radii.csv", to_csv_string(&[row])?.as_bytes())?;
            summary["radii"] = json!(r);
            if cfg.output.operator {
                let m = f.to_dense()?;
                let h = container::ContainerHeader::new(
                    m.matrix.nrows(),
                    m.matrix.ncols(),
                    "row-vectorised N x N operators, index i*N + j",
                    json!(params),
                );
                container::write_operator(&ctx.path("channel.bin"), &h, &m.matrix)?;
                ctx.record("channel.bin");
            }
        }
        ChannelKind::Classical => {
            if cfg.output.operator {
                let ch = KoopmanChannel::build(cfg.system.m, params.alpha1, params.b)?;
                ctx.write("channel.coo", coo::koopman_coo_string(&ch).as_bytes())?;
            }
        }
    }
    ctx.write_json("summary.json", &summary)?;
    done(ctx, Outcome::Ok)
}

#[derive(Serialize, Deserialize)]
struct StoredRow {
    key: String,
    alpha: f64,
    lambda1_abs: f64,
    lambda1_re: f64,
    lambda1_im: f64,
    residual: Option<f64>,
}

fn sweep_key(cfg: &RunConfig, alpha: f64) -> String {
    let s = &cfg.solver;
    sha256_hex(
        format!(
            "{:?}|{}|{:016x}|{:016x}|{:?}|{}|{:016x}|{}|{}|{:?}",
            cfg.system.kind,
            cfg.size(),
            cfg.system.b.to_bits(),
            alpha.to_bits(),
            s.backend,
            s.k,
            s.tol.to_bits(),
            s.seed,
            s.max_restarts,
            s.subspace
        )
        .as_bytes(),
    )
}

/// Completed rows of an earlier, possibly interrupted, attempt. A torn last
/// line is dropped and the file rewritten without it.
fn load_completed(path: &std::path::Path) -> Result<BTreeMap<String, StoredRow>> {
    let mut out = BTreeMap::new();
    let Ok(text) = std::fs::read_to_string(path) else {
        return Ok(out);
    };
    let mut clean = String::new();
    for line in text.split_inclusive('\n') {
        if !line.ends_with('\n') {
            break;
        }
        if let Ok(r) = serde_json::from_str::<StoredRow>(line.trim_end()) {
            clean.push_str(line);
            out.insert(r.key.clone(), r);
        }
    }
    if clean.len() != text.len() {
        crate::io::write_atomic(path, clean.as_bytes())?;
    }
    Ok(out)
}

pub fn sweep(cfg: &RunConfig) -> Result<CommandResult> {
    if cfg.task.alphas.is_empty() {
        return Err(config_err("task.alphas", "sweep needs a nonempty alpha grid"));
    }
    let mut ctx = RunContext::create("sweep", cfg)?;
    let rows_path = ctx.path("rows.jsonl");
    let done_rows = load_completed(&rows_path)?;
    let log = Mutex::new(std::fs::OpenOptions::new().create(true).append(true).open(&rows_path)?);

    let mut alphas = cfg.task.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let backend = cfg.solver.backend;
    let samples: Vec<Result<SweepSample>> = alphas
        .par_iter()
        .map(|&alpha| {
            let key = sweep_key(cfg, alpha);
            if let Some(r) = done_rows.get(&key) {
                return Ok(SweepSample {
                    alpha,
                    lambda1_abs: r.lambda1_abs,
                    lambda1_re: r.lambda1_re,
                    lambda1_im: r.lambda1_im,
                    residual: r.residual.unwrap_or(f64::NAN),
                    error: None,
                });
            }
            let opts = cfg.krylov(ctx.seed(&format!("sweep:{:016x}", alpha.to_bits())));
            let s = sweep_sample(cfg.system.kind, cfg.size(), alpha, cfg.system.b, backend, &opts);
            if s.error.is_none() {
                let stored = StoredRow {
                    key,
                    alpha,
                    lambda1_abs: s.lambda1_abs,
                    lambda1_re: s.lambda1_re,
                    lambda1_im: s.lambda1_im,
                    residual: s.residual.is_finite().then_some(s.residual),
                };
                let mut line = serde_json::to_string(&stored)?;
                line.push('\n');
                let mut f = log.lock().expect("sweep log lock");
                f.write_all(line.as_bytes())?;
                f.flush()?;
            }
            Ok(s)
        })
        .collect();
    drop(log);
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let failed = samples.iter().filter(|s| s.error.is_some()).count();
    let rows: Vec<SweepRow> = samples.iter().map(|s| SweepRow::from_sample(s, backend.name())).collect();
    ctx.write("sweep.csv", to_csv_string(&rows)?.as_bytes())?;
    ctx.record("rows.jsonl");
    done(ctx, if failed > 0 { Outcome::SolverFailures(failed) } else { Outcome::Ok })
}

fn raster_ext(cfg: &RunConfig) -> &'static str {
    match cfg.output.raster {
        RasterFormat::Pgm => "pgm",
        RasterFormat::Png => "png",
    }
}

fn render(ctx: &mut RunContext, cfg: &RunConfig, stem: &str, field: &PhaseSpaceField) -> Result<()> {
    let name = format!("{stem}.{}", raster_ext(cfg));
    render_field(field, &ctx.path(&name), cfg.output.raster, cfg.output.colormap, Some(&ctx.run_id))?;
    ctx.record(&name);
    ctx.record(&format!("{name}.json"));
    if cfg.output.field_csv {
        let csv_name = format!("{stem}.csv");
        write_field_csv(field, &ctx.path(&csv_name))?;
        ctx.record(&csv_name);
    }
    Ok(())
}

pub fn modes(cfg: &RunConfig) -> Result<CommandResult> {
    if cfg.task.modes.is_empty() {
        return Err(config_err("task.modes", "no mode indices given"));
    }
    let mut ctx = RunContext::create("modes", cfg)?;
    let kmax = *cfg.task.modes.iter().max().expect("nonempty");
    if cfg.task.side == ModeSide::Left && cfg.solver.backend == Backend::Krylov {
        return Err(config_err("task.side", "left modes need the dense backend"));
    }
    let spec = solve(cfg, &ctx, ModeRequest::Leading(kmax.max(1)))?;
    let params = cfg.params();
    let koop = match cfg.system.kind {
        ChannelKind::Classical => Some(KoopmanChannel::build(cfg.system.m, params.alpha1, params.b)?),
        ChannelKind::Quantum => None,
    };
    let mut listed = Vec::new();
    for (pos, &idx) in cfg.task.modes.iter().enumerate() {
        let pair = spec
            .pairs
            .get(idx)
            .ok_or_else(|| config_err(&format!("task.modes[{pos}]"), format!("index {idx} exceeds the {} computed modes", spec.pairs.len())))?;
        let vec = match cfg.task.side {
            ModeSide::Right => pair.right.clone(),
            ModeSide::Left => pair.left.clone(),
        }
        .ok_or_else(|| Error::Solver(format!("mode {idx} has no eigenvector")))?;
        let vec = fix_phase(vec);
        let field = match &koop {
            Some(ch) => fourier_mode_field(ch, &vec, cfg.grid.g)?,
            None => husimi_mode(&vec, cfg.grid.g)?,
        };
        let meta = json!({
            "kind": cfg.system.kind,
            "size": cfg.size(),
            "system": params,
            "index": idx,
            "side": cfg.task.side,
            "eigenvalue": complex_json(pair.value),
            "field": field.params,
        });
        render(&mut ctx, cfg, &format!("mode_{idx:03}"), &field.with_params(meta.clone()))?;
        listed.push(meta);
    }
    if cfg.task.ftse_companion {
        let f = ftse_grid(params.alpha1, cfg.grid.g, cfg.grid.t)?;
        render(&mut ctx, cfg, "ftse", &f)?;
    }
    ctx.write_json("modes.json", &json!({"run_id": ctx.run_id, "modes": listed}))?;
    done(ctx, Outcome::Ok)
}

pub fn ftse(cfg: &RunConfig) -> Result<CommandResult> {
    let mut ctx = RunContext::create("ftse", cfg)?;
    let alpha = cfg.system.alpha1;
    let f = ftse_grid(alpha, cfg.grid.g, cfg.grid.t)?;
    render(&mut ctx, cfg, "ftse", &f)?;
    let ens = ftse_ensemble_mean(alpha, cfg.grid.t, cfg.task.ftse_samples, ctx.seed("ftse"))?;
    let summary = json!({
        "alpha": alpha,
        "t": cfg.grid.t,
        "G": cfg.grid.g,
        "min": f.min(),
        "max": f.max(),
        "grid_mean": f.mean(),
        "ensemble_mean": ens,
        "samples": cfg.task.ftse_samples,
    });
    ctx.write_json("summary.json", &summary)?;
    done(ctx, Outcome::Ok)
}

pub fn radii(cfg: &RunConfig) -> Result<CommandResult> {
    let mut ctx = RunContext::create("radii", cfg)?;
    let sizes = if cfg.task.sizes.is_empty() { vec![cfg.system.n] } else { cfg.task.sizes.clone() };
    let params = cfg.params();
    let rows = sizes
        .par_iter()
        .map(|&n| {
            let f = FactoredChannel::build_any_parity(n, &params)?;
            let r = ring_radii_factored(&f);
            Ok(RadiiRow {
                n,
                b: params.b,
                r_in: r.r_in,
                r_out: r.r_o,
                ep: coupled_entangling_power(n, params.b),
                ep_bessel: ep_bessel_asymptotic(n, params.b)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ctx.write("radii.csv", to_csv_string(&rows)?.as_bytes())?;
    done(ctx, Outcome::Ok)
}

#[derive(Serialize)]
struct ValueRow {
    index: usize,
    value: f64,
}

pub fn submatrix(cfg: &RunConfig) -> Result<CommandResult> {
    let mut ctx = RunContext::create("submatrix", cfg)?;
    let params = cfg.params();
    let n = cfg.system.n;
    let s = build_submatrix(n, params.alpha1, params.b)?;
    let eig = s.eigenvalues()?;
    let rows: Vec<ValueRow> = eig.iter().enumerate().map(|(index, &value)| ValueRow { index, value }).collect();
    ctx.write("submatrix_eigenvalues.csv", to_csv_string(&rows)?.as_bytes())?;
    let top = s.top_nontrivial()?;
    let spec = leading_spectrum(ChannelKind::Quantum, n, &params, cfg.solver.backend, 1, &cfg.krylov(ctx.seed("krylov")))?;
    let l1 = spec.lambda1().map(|z| z.norm()).unwrap_or(f64::NAN);
    let summary = json!({
        "N": n,
        "params": params,
        "hermiticity_defect": s.hermiticity_defect(),
        "top_nontrivial": top,
        "lambda1_abs": l1,
        "bound_holds": top <= l1 + 1e-8,
        "basis_residual": s.basis.residual,
    });
    ctx.write_json("summary.json", &summary)?;
    done(ctx, Outcome::Ok)
}

#[derive(Serialize)]
struct CorrelationRow {
    t: usize,
    re: f64,
    im: f64,
    abs: f64,
}

/// Normalised Weyl operator `Z^m X^n / sqrt(N)` with `Z` the clock and `X` the shift.
fn weyl_operator(n: usize, m: i64, k: i64) -> Mat<C64> {
    let nn = n as i64;
    let s = 1.0 / (n as f64).sqrt();
    Mat::from_fn(n, n, |i, j| {
        if (i as i64 - j as i64 - k).rem_euclid(nn) == 0 {
            C64::from_polar(s, std::f64::consts::TAU * (m * i as i64) as f64 / n as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn correlations(cfg: &RunConfig) -> Result<CommandResult> {
    let mut ctx = RunContext::create("correlations", cfg)?;
    let params = cfg.params();
    let [om, on] = cfg.task.observable;
    let values = match cfg.system.kind {
        ChannelKind::Classical => {
            let ch = KoopmanChannel::build(cfg.system.m, params.alpha1, params.b)?;
            let f = ch.fourier_mode(om, on).map_err(|e| config_err("task.observable", e.to_string()))?;
            ch.correlation(&f, &f, cfg.task.t_max)
        }
        ChannelKind::Quantum => {
            let n = cfg.system.n;
            let ch = FactoredChannel::build(n, &params)?;
            let a = weyl_operator(n, om, on);
            let a0 = crate::linalg::adjoint(&a);
            operator_correlation(&ch as &dyn LinearMap, n, &a0, &a, cfg.task.t_max)?
        }
    };
    let rows: Vec<CorrelationRow> =
        values.iter().enumerate().map(|(t, z)| CorrelationRow { t, re: z.re, im: z.im, abs: z.norm() }).collect();
    ctx.write("correlations.csv", to_csv_string(&rows)?.as_bytes())?;
    done(ctx, Outcome::Ok)
}

pub fn verify(cfg: &RunConfig, level: Level, golden: Option<PathBuf>, only: Vec<String>) -> Result<CommandResult> {
    let known = verify::criterion_ids();
    if let Some(bad) = only.iter().find(|o| !known.contains(&o.as_str())) {
        return Err(config_err("--only", format!("unknown criterion {bad}; known: {}", known.join(", "))));
    }
    let key = format!("{level:?} {}", only.join(" "));
    let mut ctx = RunContext::create_keyed("verify", &key, cfg)?;
    let opts = verify::VerifyOptions { level, seed: cfg.solver.seed, golden, only };
    let verdicts = verify::run_suite(&opts, |v| println!("{}", v.line()));
    let failed = verdicts.iter().filter(|v| v.status == Status::Fail).count();
    ctx.write_json("verdicts.json", &json!({"level": level, "verdicts": verdicts}))?;
    done(ctx, if failed > 0 { Outcome::AcceptanceFailures(failed) } else { Outcome::Ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_operators_are_orthonormal() {
        let n = 6;
        let a = weyl_operator(n, 1, 2);
        let b = weyl_operator(n, 2, 1);
        let tr = |x: &Mat<C64>, y: &Mat<C64>| (crate::linalg::adjoint(x) * y).diagonal().column_vector().iter().sum::<C64>();
        assert!((tr(&a, &a) - 1.0).norm() < 1e-12);
        assert!(tr(&a, &b).norm() < 1e-12);
    }
}

use super::{Check, Spec, VerifyOptions};
use crate::bessel::bessel_j0;
use crate::classical::{ftse, ftse_ensemble_mean, ftse_grid};
use crate::harness::derive_seed;
use crate::io::sha256_hex;
use crate::koopman::oracle::{stochastic_step_oracle, two_step_oracle, NoisePlacement};
use crate::koopman::KoopmanChannel;
use crate::linalg::max_abs_diff;
use crate::phase_space::{husimi_mode, husimi_mode_tensor, render_field, CoherentStateGrid, Colormap, RasterFormat};
use crate::quantum::channel::{brute_force_channel, channel_from_unitary, trivial_mode};
use crate::quantum::cptp::{cptp_report, kraus_operators};
use crate::quantum::submatrix::{build_submatrix, fix_phase};
use crate::quantum::{coupled_unitary, FactoredChannel};
use crate::spectral::entangle::coupled_entangling_power;
use crate::spectral::rings::{annulus_occupancy, occupied_annulus, ring_radii_factored, RingRadii};
use crate::spectral::sweep::{lambda1_sweep, leading_spectrum, Backend, ChannelKind};
use crate::spectral::{channel_spectrum, factored_spectrum, nearest_match, top_k, KrylovOptions, ModeRequest};
use crate::{Error, Result, SystemParams, C64};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;

pub(super) const SUITE: &[Spec] = &[
    Spec { id: "1", title: "Bessel limit of lambda_1", budget_seconds: 120.0, full_only: false, run: bessel_limit },
    Spec { id: "2", title: "leading eigenvalues at alpha=2, b=0.1", budget_seconds: 600.0, full_only: false, run: table_one },
    Spec { id: "2f", title: "quantum N=150 leading eigenvalues", budget_seconds: 3600.0, full_only: true, run: table_one_full },
    Spec { id: "3", title: "channel construction oracles", budget_seconds: 30.0, full_only: false, run: oracle_equivalence },
    Spec { id: "4", title: "CPTP and unitality", budget_seconds: 300.0, full_only: false, run: cptp_suite },
    Spec { id: "5", title: "single-ring law", budget_seconds: 1800.0, full_only: true, run: ring_law },
    Spec { id: "6", title: "lambda_1 sweep morphology", budget_seconds: 1200.0, full_only: true, run: sweep_morphology },
    Spec { id: "7", title: "Hermitian submatrix bound", budget_seconds: 900.0, full_only: false, run: submatrix_suite },
    Spec { id: "8", title: "Koopman stochastic oracle", budget_seconds: 600.0, full_only: false, run: koopman_oracle },
    Spec { id: "9", title: "Husimi invariants", budget_seconds: 600.0, full_only: false, run: husimi_suite },
    Spec { id: "10", title: "finite-time stability exponent", budget_seconds: 120.0, full_only: false, run: ftse_suite },
    Spec { id: "golden", title: "golden raster hashes", budget_seconds: 60.0, full_only: false, run: golden_check },
];

const TABLE_BS: [f64; 4] = [0.1, 0.5, 1.0, 1.5];
const TABLE_QUANTUM_L1: [f64; 4] = [0.9975038, 0.9385251, 0.7653987, 0.51220999];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn classical_reference() -> Vec<C64> {
    vec![c(0.997283, 0.0), c(0.988262, 0.0), c(0.972954, 0.0), c(0.033911, -0.965327), c(0.954322, 0.0), c(-0.952471, 0.0), c(0.946673, 0.0)]
}

fn quantum60_reference() -> Vec<C64> {
    vec![c(0.997284, 0.0), c(0.988423, 0.0), c(0.973587, 0.0), c(0.037937, -0.969138), c(0.954678, 0.0), c(-0.941840, 0.0), c(0.944247, 0.0)]
}

fn quantum150_reference() -> Vec<C64> {
    vec![c(0.997282, 0.0), c(0.988282, 0.0), c(0.973024, 0.0), c(0.034536, -0.965917), c(0.954011, 0.0), c(-0.952129, 0.0), c(0.946710, 0.0)]
}

fn krylov(seed: u64) -> KrylovOptions {
    KrylovOptions { seed, ..KrylovOptions::default() }
}

fn lambda1(spec: &crate::spectral::SpectralDecomposition) -> Result<C64> {
    spec.lambda1().ok_or_else(|| Error::Solver("no non-trivial eigenvalue".into()))
}

fn match_check(name: &str, reference: &[C64], computed: &[C64], tol: f64) -> Check {
    let m = nearest_match(reference, computed);
    let worst = m.iter().map(|x| x.2).fold(0.0, f64::max);
    let detail = m.iter().map(|(r, x, d)| format!("{r:.6} -> {x:.6} ({d:.1e})")).collect::<Vec<_>>().join("; ");
    Check::new(name, worst <= tol, format!("max distance {worst:.2e} (tol {tol:.0e}): {detail}"))
}

fn bessel_limit(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let seed_a = derive_seed(opts.seed, "criterion-1-a");
    let seed_b = derive_seed(opts.seed, "criterion-1-b");
    for (i, &b) in TABLE_BS.iter().enumerate() {
        let p = SystemParams::new(0.0, 0.0, b)?;
        let cl = lambda1(&leading_spectrum(ChannelKind::Classical, 20, &p, Backend::Krylov, 2, &krylov(seed_a))?)?;
        let j0 = bessel_j0(b);
        out.push(Check::new(
            format!("classical b={b}"),
            (cl.norm() - j0).abs() <= 1e-8,
            format!("|lambda_1| = {:.10}, J0(b) = {j0:.10}", cl.norm()),
        ));
        let q1 = lambda1(&leading_spectrum(ChannelKind::Quantum, 60, &p, Backend::Krylov, 2, &krylov(seed_a))?)?.norm();
        let q2 = lambda1(&leading_spectrum(ChannelKind::Quantum, 60, &p, Backend::Krylov, 2, &krylov(seed_b))?)?.norm();
        out.push(Check::new(
            format!("quantum N=60 b={b}"),
            (q1 - TABLE_QUANTUM_L1[i]).abs() <= 5e-4 && (q1 - q2).abs() <= 1e-6,
            format!("|lambda_1| = {q1:.8} (table {}), rerun with another start differs by {:.1e}", TABLE_QUANTUM_L1[i], (q1 - q2).abs()),
        ));
    }
    Ok(out)
}

fn table_one(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let p = SystemParams::new(2.0, 2.0, 0.1)?;
    let cl = leading_spectrum(ChannelKind::Classical, 45, &p, Backend::Krylov, 8, &krylov(derive_seed(opts.seed, "criterion-2")))?;
    let q = factored_spectrum(&FactoredChannel::build(60, &p)?, ModeRequest::None)?;
    Ok(vec![
        match_check("classical M=45", &classical_reference(), &cl.nontrivial_values(), 1e-5),
        match_check("quantum N=60 dense", &quantum60_reference(), &q.nontrivial_values(), 1e-5),
    ])
}

fn table_one_full(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let p = SystemParams::new(2.0, 2.0, 0.1)?;
    let q = leading_spectrum(ChannelKind::Quantum, 150, &p, Backend::Krylov, 8, &krylov(derive_seed(opts.seed, "criterion-2f")))?;
    Ok(vec![match_check("quantum N=150 krylov", &quantum150_reference(), &q.nontrivial_values(), 1e-4)])
}

fn oracle_equivalence(_: &VerifyOptions) -> Result<Vec<Check>> {
    let n = 8;
    let p = SystemParams::new(2.0, 3.0, 0.7)?;
    let u = coupled_unitary(n, &p)?;
    let m = channel_from_unitary(&u)?;
    let brute = brute_force_channel(&u)?;
    let fast = FactoredChannel::build(n, &p)?.to_dense()?;
    let other = channel_from_unitary(&coupled_unitary(n, &SystemParams::new(2.0, 0.4, 0.7)?)?)?;
    let d1 = m.max_abs_diff(&brute);
    let d2 = m.max_abs_diff(&fast);
    let d3 = m.max_abs_diff(&other);
    Ok(vec![
        Check::new("realignment vs partial trace", d1 <= 1e-12, format!("{d1:.1e}")),
        Check::new("factored vs generic", d2 <= 1e-12, format!("{d2:.1e}")),
        Check::new("alpha_2 independence", d3 <= 1e-12, format!("{d3:.1e}")),
    ])
}

fn cptp_suite(_: &VerifyOptions) -> Result<Vec<Check>> {
    let mut grid = Vec::new();
    for n in [8usize, 40] {
        for a in [0.0, 2.0, 6.0] {
            for b in [0.1, 0.5, 1.0] {
                grid.push((n, a, b));
            }
        }
    }
    grid.par_iter()
        .map(|&(n, a, b)| {
            let u = coupled_unitary(n, &SystemParams::new(a, a, b)?)?;
            let m = channel_from_unitary(&u)?;
            let k = kraus_operators(&u)?;
            let r = cptp_report(&m, Some(&k))?;
            let spec = channel_spectrum(&m, ModeRequest::None)?;
            let rho = spec.pairs.iter().map(|p| p.value.norm()).fold(0.0, f64::max);
            let kc = r.kraus_completeness.unwrap_or(f64::INFINITY);
            let pass = r.choi_min_eigenvalue > -1e-10 && r.unitality_residual < 1e-12 && kc < 1e-12 && (rho - 1.0).abs() <= 1e-8;
            Ok(Check::new(
                format!("N={n} alpha={a} b={b}"),
                pass,
                format!(
                    "choi min {:.1e}, unitality {:.1e}, kraus {:.1e}, radius-1 {:.1e}",
                    r.choi_min_eigenvalue,
                    r.unitality_residual,
                    kc,
                    rho - 1.0
                ),
            ))
        })
        .collect()
}

fn nontrivial_spectrum(n: usize, alpha: f64, b: f64) -> Result<Vec<C64>> {
    let f = FactoredChannel::build_any_parity(n, &SystemParams::new(alpha, alpha, b)?)?;
    Ok(factored_spectrum(&f, ModeRequest::None)?.nontrivial_values())
}

fn ring_law(_: &VerifyOptions) -> Result<Vec<Check>> {
    let b = 0.1;
    let mut out = Vec::new();
    let f = FactoredChannel::build(60, &SystemParams::new(6.0, 6.0, b)?)?;
    let fr = ring_radii_factored(&f);
    let radii = RingRadii { r_o: (1.0 - coupled_entangling_power(60, b)).sqrt(), ..fr };
    let spec = nontrivial_spectrum(60, 6.0, b)?;
    let occ = annulus_occupancy(&spec, &radii, 0.02);
    out.push(Check::new(
        "occupancy N=60",
        occ >= 0.7,
        format!("{:.3} of eigenvalues within [{:.4}, {:.4}] padded by 0.02", occ, radii.r_in, radii.r_o),
    ));

    // r_o from the Frobenius norm of the assembled channel at two kick strengths.
    let r_o = |alpha: f64| -> Result<f64> {
        let n = 60usize;
        let m = FactoredChannel::build(n, &SystemParams::new(alpha, alpha, b)?)?.to_dense()?;
        Ok((m.deflated_norm_sqr() / (n * n - 1) as f64).sqrt())
    };
    let (r2, r6) = (r_o(2.0)?, r_o(6.0)?);
    out.push(Check::new(
        "r_o alpha invariance",
        (r2 - r6).abs() <= 1e-10 && (r6 - radii.r_o).abs() <= 1e-10,
        format!("r_o(2) = {r2:.12}, r_o(6) = {r6:.12}, sqrt(1-e_p) = {:.12}", radii.r_o),
    ));

    let sizes = [60usize, 75, 100];
    let mut areas = Vec::new();
    let mut outer = Vec::new();
    for &n in &sizes {
        let vals = if n == 60 { spec.clone() } else { nontrivial_spectrum(n, 6.0, b)? };
        let a = occupied_annulus(&vals, 0.05)?;
        areas.push(a.area);
        outer.push(a.outer);
    }
    let monotone = areas.windows(2).all(|w| w[1] < w[0]);
    out.push(Check::new(
        "occupied area shrinks with N",
        monotone,
        format!(
            "central 90% annulus areas {:?} for N = {:?} (outer radii {:?})",
            areas.iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>(),
            sizes,
            outer.iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>()
        ),
    ));
    Ok(out)
}

fn sweep_morphology(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let alphas = [3.5, 4.5, 6.0, 6.5, 9.0, 9.3];
    let s = lambda1_sweep(&alphas, 0.1, 30, ChannelKind::Classical, Backend::Krylov, &krylov(derive_seed(opts.seed, "criterion-6")))?;
    let v = |a: f64| s.at(a).map(|x| x.lambda1_abs).unwrap_or(f64::NAN);
    let drop = v(3.5) - v(4.5);
    Ok(vec![
        Check::new("drop across alpha=4", drop > 0.05, format!("|l1|(3.5) - |l1|(4.5) = {drop:.5} (need > 0.05)")),
        Check::new("maximum near 6.5", v(6.5) > v(6.0), format!("|l1|(6.0) = {:.6}, |l1|(6.5) = {:.6}", v(6.0), v(6.5))),
        Check::new("maximum near 9.3", v(9.3) > v(9.0), format!("|l1|(9.0) = {:.6}, |l1|(9.3) = {:.6}", v(9.0), v(9.3))),
    ])
}

fn submatrix_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let n = 60;
    let b = 0.1;
    let seed = derive_seed(opts.seed, "criterion-7");
    let rows = (0..=20)
        .into_par_iter()
        .map(|i| {
            let alpha = i as f64 * 0.5;
            let s = build_submatrix(n, alpha, b)?;
            let top = s.top_nontrivial()?;
            let spec = leading_spectrum(ChannelKind::Quantum, n, &SystemParams::new(alpha, alpha, b)?, Backend::Krylov, 4, &krylov(seed))?;
            Ok((alpha, s.hermiticity_defect(), top, lambda1(&spec)?.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let herm = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let worst = rows.iter().map(|r| r.2 - r.3).fold(f64::NEG_INFINITY, f64::max);
    let bad: Vec<String> = rows.iter().filter(|r| r.2 > r.3 + 1e-8).map(|r| format!("{}", r.0)).collect();
    let s0 = build_submatrix(n, 2.0, 0.0)?;
    let id = max_abs_diff(&s0.matrix, &crate::linalg::identity(n));
    Ok(vec![
        Check::new("hermitian", herm <= 1e-12, format!("max defect {herm:.1e}")),
        Check::new(
            "bound on 21 samples",
            bad.is_empty(),
            format!("max of lambda_max(M_S) - |lambda_1| = {worst:.2e}; violations at alpha {bad:?}"),
        ),
        Check::new("b=0 identity", id <= 1e-12, format!("max |M_S - I| = {id:.1e}")),
    ])
}

fn koopman_oracle(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let (alpha, b) = (2.0, 0.5);
    let samples = 200;
    let ch = KoopmanChannel::build(6, alpha, b)?;
    let trip = ch.triplets();
    let dim = ch.dimension();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, "criterion-8"));
    // Sampling only uniformly would almost always hit the structural zeros.
    let picks: Vec<(usize, usize)> = (0..50)
        .map(|i| {
            if i % 10 < 7 {
                let (r, c, _) = trip[rng.random_range(0..trip.len())];
                (r, c)
            } else {
                (rng.random_range(0..dim), rng.random_range(0..dim))
            }
        })
        .collect();
    let base = derive_seed(opts.seed, "criterion-8-mc");
    let results: Vec<(usize, usize, f64, f64, bool)> = picks
        .par_iter()
        .enumerate()
        .map(|(i, &(r, c))| {
            let exact = C64::new(ch.get(r, c), 0.0);
            let e = stochastic_step_oracle(alpha, b, ch.mode_of(c), ch.mode_of(r), samples, base.wrapping_add(i as u64), NoisePlacement::AfterLocalStep);
            (r, c, (e.mean - exact).norm(), e.sigma(), e.agrees_with(exact, 3.0))
        })
        .collect();
    let bad: Vec<String> = results.iter().filter(|x| !x.4).map(|x| format!("({}, {}) off by {:.2e}, sigma {:.2e}", x.0, x.1, x.2, x.3)).collect();
    let worst = results.iter().map(|x| x.2 / x.3.max(1e-300)).fold(0.0, f64::max);

    let big = KoopmanChannel::build(12, alpha, b)?;
    let (f, g) = ((1, 0), (0, 1));
    let fv = big.fourier_mode(f.0, f.1)?;
    let gv = big.fourier_mode(g.0, g.1)?;
    let exact2 = big.correlation(&fv, &gv, 2)[2];
    let e2 = two_step_oracle(alpha, b, f, g, samples, derive_seed(opts.seed, "criterion-8-two"), NoisePlacement::AfterLocalStep);
    Ok(vec![
        Check::new("50 sampled elements", bad.is_empty(), format!("worst deviation {worst:.2} sigma; failures: {bad:?}")),
        Check::new(
            "two-step semigroup",
            e2.agrees_with(exact2, 3.0),
            format!("<g|K^2|f> = {exact2:.6}, estimate {:.6} +- {:.1e}", e2.mean, e2.sigma()),
        ),
    ])
}

fn scratch_dir(tag: &str) -> Result<std::path::PathBuf> {
    let d = std::env::temp_dir().join(format!("rotor-verify-{tag}-{}-{:x}", std::process::id(), rand::random::<u64>()));
    std::fs::create_dir_all(&d)?;
    Ok(d)
}

fn husimi_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let res = CoherentStateGrid::new(60)?.resolution_defect();
    out.push(Check::new("resolution of identity N=60", res < 1e-8, format!("{res:.1e}")));

    let p = SystemParams::new(2.0, 2.0, 0.1)?;
    let small = factored_spectrum(&FactoredChannel::build(20, &p)?, ModeRequest::Leading(1))?;
    let mode = small.nontrivial().next().and_then(|x| x.right.clone()).ok_or_else(|| Error::Solver("no lambda_1 mode".into()))?;
    let (h1, h2) = (husimi_mode(&mode, 32)?, husimi_mode_tensor(&mode, 32)?);
    let d = h1.values.iter().zip(&h2.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(Check::new("tensor vs operator form", d < 1e-12, format!("{d:.1e}")));

    let dir = scratch_dir("husimi")?;
    let triv = husimi_mode(&trivial_mode(20), 32)?;
    let path = dir.join("trivial.pgm");
    let r = render_field(&triv, &path, RasterFormat::Pgm, Colormap::Gray, None);
    let bytes = std::fs::read(&path);
    let _ = std::fs::remove_dir_all(&dir);
    r?;
    let bytes = bytes?;
    let pixels = &bytes[bytes.len() - 2 * 32 * 32..];
    let uniform = pixels.chunks(2).all(|px| px == &pixels[..2]);
    out.push(Check::new(
        "trivial mode raster uniform",
        uniform && triv.max() - triv.min() <= 1e-14 * triv.max(),
        format!("field spread {:.1e}", triv.max() - triv.min()),
    ));

    let f = FactoredChannel::build(100, &p)?;
    let t = f.trivial_mode();
    let spec = top_k(&f, 2, Some(&t), &krylov(derive_seed(opts.seed, "criterion-9")))?;
    let l1 = spec.nontrivial().next().ok_or_else(|| Error::Solver("no lambda_1 mode".into()))?;
    let v = fix_phase(l1.right.clone().ok_or_else(|| Error::Solver("lambda_1 mode missing".into()))?);
    let h = husimi_mode(&v, 100)?;
    let mass = h.mass_within(0.0, 0.0, 0.15);
    out.push(Check::new(
        "lambda_1 mode localised at the origin",
        mass >= 0.3,
        format!("{mass:.3} of the weight within 0.15 of (0, 0), lambda_1 = {:.6}", l1.value),
    ));
    Ok(out)
}

fn ftse_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let t = 8;
    let ln2t = 2f64.ln() / t as f64;
    let f0 = ftse_grid(0.0, 32, t)?;
    let dev = f0.values.iter().map(|v| (v - ln2t).abs()).fold(0.0, f64::max);
    let below = ftse(3.9, 0.0, 0.0, t)?;
    let above = ftse(4.1, 0.0, 0.0, t)?;
    let ens = ftse_ensemble_mean(10.0, t, 20_000, derive_seed(opts.seed, "criterion-10"))?;
    Ok(vec![
        Check::new("alpha=0 constant", dev <= 1e-12, format!("max |ftse - ln2/t| = {dev:.1e}")),
        Check::new(
            "origin changes stability at alpha=4",
            below <= ln2t + 1e-12 && above > ln2t,
            format!("ftse(3.9) = {below:.4}, ftse(4.1) = {above:.4}, ln2/t = {ln2t:.4}"),
        ),
        Check::new("ensemble mean at alpha=10", (ens - 5f64.ln()).abs() <= 0.15, format!("{ens:.4} vs ln 5 = {:.4}", 5f64.ln())),
    ])
}

pub(super) fn golden_hashes(dir: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let ftse_field = ftse_grid(2.0, 64, 8)?;
    let p = SystemParams::new(2.0, 2.0, 0.1)?;
    let spec = factored_spectrum(&FactoredChannel::build(20, &p)?, ModeRequest::Leading(1))?;
    let mode = spec.nontrivial().next().and_then(|x| x.right.clone()).ok_or_else(|| Error::Solver("no lambda_1 mode".into()))?;
    let husimi = husimi_mode(&fix_phase(mode), 32)?;
    for (name, field) in [("ftse_a2_g64.pgm", &ftse_field), ("husimi_l1_n20_g32.pgm", &husimi)] {
        let path = dir.join(name);
        render_field(field, &path, RasterFormat::Pgm, Colormap::Gray, None)?;
        out.insert(name.to_string(), sha256_hex(&std::fs::read(&path)?));
    }
    Ok(out)
}

fn golden_check(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let path = opts.golden.clone().unwrap_or_else(super::default_golden_path);
    let want: BTreeMap<String, String> = match std::fs::read(&path).map_err(Error::from).and_then(|b| Ok(serde_json::from_slice(&b)?)) {
        Ok(w) => w,
        Err(e) => return Ok(vec![Check::new("golden file", false, format!("{}: {e}", path.display()))]),
    };
    let dir = scratch_dir("golden")?;
    let got = golden_hashes(&dir);
    let _ = std::fs::remove_dir_all(&dir);
    let got = got?;
    let mut checks: Vec<Check> = got
        .iter()
        .map(|(name, h)| {
            let w = want.get(name).map(String::as_str).unwrap_or("<missing>");
            Check::new(name.clone(), w == h, format!("expected {w}, got {h}"))
        })
        .collect();
    for name in want.keys().filter(|k| !got.contains_key(*k)) {
        checks.push(Check::new(name.clone(), false, "listed in the golden file but not produced"));
    }
    Ok(checks)
}

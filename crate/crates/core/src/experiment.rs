//! Experiment drivers. Each config kind maps to one driver; every driver
//! returns a JSON summary plus per-run CSV tables, and [`run_experiment`]
//! writes them next to a manifest and a plotting script.

use crate::asymptotics::{cs_integral, cs_limit_constant, envelope_constant, envelope_sweep, lp_membership, AsymptoticsError, Membership};
use crate::config::{ExperimentKind, RunConfig};
use crate::corpus;
use crate::diagnostics::{
    boundary_singularity_monitor, consistency_residual, critical_scan, fit_power_law, velocity_norms,
    DiagnosticsError, RateFit, ScanEntry,
};
use crate::elliptic::{
    boundary_derivative_formula, homogeneous_expansion, homogeneous_pair, solve_dirichlet, split_first_derivative,
    EllipticError,
};
use crate::evolve::{
    constant_model_exact, constant_model_simulate, run, scattering_profile, ConstantModelParams, EvolveError, InitialData,
    ModeSystem, RunSeries, RunSpec, ScatteringRate,
};
use crate::grid::{Grid, GridError};
use crate::norms::{
    bn_constants, commutator_constant, hs_torus, lipschitz_multiplier_check, norm_report, torus_fourier_seminorm,
    torus_kernel_seminorm, w1inf_norm, NormError, NormPlan, NormReport,
};
use crate::profiles::{build_coefficients, CoefficientPair, ProfileError, ShearProfile};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed summary {path}: {message}")]
    Summary { path: PathBuf, message: String },
}

/// Text outputs of one experiment before they are written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Value,
    /// `(file name, CSV text)`.
    pub tables: Vec<(String, String)>,
}

/// Where [`run_experiment`] put its files.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

pub const CONVENTIONS: [(&str, &str); 6] = [
    ("fourier", "modes carry e^{-ikx}"),
    ("operator", "(-1 + (g(d_y/k + it))^2) Phi = W, Phi = 0 at y = 0, 1"),
    ("evolution", "d_t W = -(i f / k) Phi"),
    ("stream_function", "Phi = k^2 psi"),
    ("homogeneous", "u1(t, y) = e^{-ikty} u1(0, y) with u1(0) = 1, u1(1) = 0; u2 mirrored"),
    ("torus_norm", "sum (1 + |n|^{2s}) |u_n|^2 on a unit period"),
];

/// Sha-256 of the canonical JSON form of the config.
pub fn config_hash(cfg: &RunConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    hex(&Sha256::digest(text.as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Runs `cfg` on `workers` threads and writes its outputs under
/// `out_root/<name>/`. Reruns produce byte-identical files.
pub fn run_experiment(cfg: &RunConfig, out_root: &Path, workers: usize) -> Result<Artifacts, ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let outcome = pool.install(|| compute(cfg))?;
    let dir = out_root.join(&cfg.name);
    std::fs::create_dir_all(&dir).map_err(|source| ExperimentError::Io { path: dir.clone(), source })?;
    let hash = config_hash(cfg);
    let summary = json!({
        "name": cfg.name,
        "kind": cfg.kind,
        "config_hash": hash,
        "results": outcome.summary,
    });
    let mut files: Vec<(String, String)> = outcome.tables.clone();
    files.push(("summary.json".into(), pretty(&summary)));
    files.push(("plot.py".into(), plot_script(&outcome.tables)));
    let digests: BTreeMap<&str, String> = files
        .iter()
        .map(|(name, text)| (name.as_str(), hex(&Sha256::digest(text.as_bytes()))))
        .collect();
    let manifest = json!({
        "name": cfg.name,
        "kind": cfg.kind,
        "config_hash": hash,
        "config": cfg,
        "conventions": CONVENTIONS.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "versions": {
            "package": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "output_format": 1,
        },
        "files": digests,
    });
    files.push(("manifest.json".into(), pretty(&manifest)));
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in &files {
        let path = dir.join(name);
        write_atomic(&path, text)?;
        written.push(path);
    }
    Ok(Artifacts {
        dir,
        files: written,
        summary,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn write_atomic(path: &Path, text: &str) -> Result<(), ExperimentError> {
    let tmp = path.with_extension("tmp");
    let io = |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::write(&tmp, text).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// Runs the driver for `cfg.kind` without touching the filesystem.
pub fn compute(cfg: &RunConfig) -> Result<Outcome, ExperimentError> {
    match cfg.kind {
        ExperimentKind::Evolve | ExperimentKind::Scan => evolve_experiment(cfg),
        ExperimentKind::Consistency => consistency_experiment(cfg),
        ExperimentKind::Formula => formula_experiment(cfg),
        ExperimentKind::ConstantModel => Ok(constant_model_experiment(cfg)),
        ExperimentKind::Asymptotics => asymptotics_experiment(cfg),
        ExperimentKind::Norms => norms_experiment(),
    }
}

pub fn build_profile(cfg: &RunConfig) -> Result<ShearProfile, ProfileError> {
    match (&cfg.flow.table, cfg.flow.name.as_str()) {
        (Some(path), "table") => ShearProfile::from_csv(path),
        _ => ShearProfile::named(&cfg.flow.name, cfg.flow.param),
    }
}

fn setup(cfg: &RunConfig) -> Result<(Grid, CoefficientPair, InitialData), ExperimentError> {
    let grid = Grid::new(cfg.grid.n, cfg.grid.m)?;
    let coeffs = build_coefficients(&build_profile(cfg)?, cfg.grid.n)?;
    let data = InitialData::parse(&cfg.initial_data)?;
    Ok((grid, coeffs, data))
}

fn run_spec(cfg: &RunConfig) -> RunSpec {
    RunSpec {
        t_end: cfg.t_end,
        dt0: cfg.dt0,
        snapshots_per_decade: cfg.snapshots_per_decade,
    }
}

fn k_label(k: f64) -> String {
    format!("{k}").replace('-', "m").replace('.', "p")
}

fn e(x: f64) -> String {
    format!("{x:.12e}")
}

/// A mode run together with its per-snapshot norms.
pub struct ModeRun {
    pub series: RunSeries,
    pub reports: Vec<NormReport>,
    /// `(s, H^s(𝕋) norm² of ∂_yW)` per snapshot.
    pub torus: Vec<Vec<(f64, f64)>>,
    /// `(full, v₂)` velocity norms per snapshot.
    pub velocity: Vec<(f64, f64)>,
}

pub fn mode_run(
    k: f64,
    data: InitialData,
    coeffs: &CoefficientPair,
    grid: &Grid,
    spec: &RunSpec,
    interval_s: &[f64],
    torus_s: &[f64],
) -> Result<ModeRun, ExperimentError> {
    let sys = ModeSystem::new(k, coeffs, grid)?;
    let series = run(data.sample(grid), &sys, spec)?;
    let plan = NormPlan {
        interval_s: interval_s.to_vec(),
        ..NormPlan::default()
    };
    let mut reports = Vec::with_capacity(series.snapshots.len());
    let mut torus = Vec::with_capacity(series.snapshots.len());
    let mut velocity = Vec::with_capacity(series.snapshots.len());
    for snap in &series.snapshots {
        reports.push(norm_report(snap.t, &snap.w, grid, &plan)?);
        let dw = grid.to_uniform(&grid.diff(&snap.w));
        torus.push(torus_s.iter().map(|&s| hs_torus(&dw, s).map(|v| (s, v))).collect::<Result<_, _>>()?);
        velocity.push(velocity_norms(&snap.solution, coeffs, grid));
    }
    Ok(ModeRun {
        series,
        reports,
        torus,
        velocity,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WallSummary {
    pub dw_log_fits: (Option<RateFit>, Option<RateFit>),
    /// `|f W₀ / g²|` at each wall, the expected log-growth slopes.
    pub dw_predicted_slopes: (f64, f64),
    pub d2w_log_fits: (Option<RateFit>, Option<RateFit>),
    pub dw_limits: Option<[[f64; 2]; 2]>,
    pub dw_converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeSummary {
    pub k: f64,
    pub steps: u64,
    pub dt: f64,
    pub error_estimate: f64,
    pub l2_ceiling: f64,
    pub ceiling_breach: Option<f64>,
    /// `|∂_yΦ(0)|` over `[10, t_end]`.
    pub dphi0_fit: Option<RateFit>,
    /// `max_{t ≥ 10} t² |∂_yΦ(0) − k W(0) / (i t g(0)²)|`.
    pub dphi0_leading_defect: f64,
    /// Velocity fits over the last decade.
    pub velocity_full_fit: Option<RateFit>,
    pub velocity_v2_fit: Option<RateFit>,
    pub scattering_fit: Option<RateFit>,
    pub wall: WallSummary,
    pub scan: Option<Vec<ScanEntry>>,
}

fn late(series: &RunSeries, t_min: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
    series.snapshots.iter().enumerate().filter(move |(_, s)| s.t >= t_min).map(|(i, s)| (i, s.t))
}

pub fn summarize_mode(
    m: &ModeRun,
    data: InitialData,
    coeffs: &CoefficientPair,
    spec: &RunSpec,
    grid: &Grid,
    scan: bool,
) -> Result<ModeSummary, ExperimentError> {
    let series = &m.series;
    let k = series.k;
    let n = coeffs.g.len();
    let t_end = spec.t_end;
    let (ts, dphi0): (Vec<f64>, Vec<f64>) = late(series, 10.0)
        .map(|(i, t)| (t, series.snapshots[i].solution.dphi_bdry.0.norm()))
        .unzip();
    let w0 = series.initial[0];
    let g0 = coeffs.g[0];
    let defect = late(series, 10.0)
        .map(|(i, t)| {
            let lead = k * w0 / (Complex64::new(0.0, t) * g0 * g0);
            t * t * (series.snapshots[i].solution.dphi_bdry.0 - lead).norm()
        })
        .fold(0.0, f64::max);
    let decade = (t_end / 10.0, t_end);
    let (tv, (full, v2)): (Vec<f64>, (Vec<f64>, Vec<f64>)) =
        late(series, 1.0).map(|(i, t)| (t, m.velocity[i])).unzip();
    let scattering_fit = match scattering_profile(series, grid).map(|p| p.rate) {
        Ok(ScatteringRate::Fitted(f)) => Some(f),
        _ => None,
    };
    let mon = boundary_singularity_monitor(series, data.is_zero_dirichlet());
    let slope = |i: usize| (coeffs.f[i] * series.initial[i] / (coeffs.g[i] * coeffs.g[i])).norm();
    let wall = WallSummary {
        dw_log_fits: mon.dw_fits.clone(),
        dw_predicted_slopes: (slope(0), slope(n - 1)),
        d2w_log_fits: mon.d2w_fits.clone(),
        dw_limits: mon.limits.map(|(a, b)| [[a.re, a.im], [b.re, b.im]]),
        dw_converged: mon.dw_converged,
    };
    let scan = if scan {
        let rows: Vec<(usize, f64)> = late(series, 1.0).collect();
        let times: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let s_list: Vec<f64> = m.reports.first().map(|r| r.hs_interval.iter().map(|p| p.0).collect()).unwrap_or_default();
        let norms: Vec<(f64, Vec<f64>)> = s_list
            .iter()
            .enumerate()
            .map(|(j, &s)| (s, rows.iter().map(|&(i, _)| m.reports[i].hs_interval[j].1).collect()))
            .collect();
        critical_scan(&times, &norms).ok()
    } else {
        None
    };
    Ok(ModeSummary {
        k,
        steps: series.steps,
        dt: spec.dt(k),
        error_estimate: series.error_estimate,
        l2_ceiling: series.l2_ceiling,
        ceiling_breach: series.ceiling_breach,
        dphi0_fit: fit_power_law(&ts, &dphi0, (10.0, t_end)).ok(),
        dphi0_leading_defect: defect,
        velocity_full_fit: fit_power_law(&tv, &full, decade).ok(),
        velocity_v2_fit: fit_power_law(&tv, &v2, decade).ok(),
        scattering_fit,
        wall,
        scan,
    })
}

fn mode_table(m: &ModeRun) -> String {
    let mut out = String::from("t,l2,velocity_full,velocity_v2");
    for part in ["dphi0", "dphi1", "dw0", "dw1", "d2w0", "d2w1"] {
        let _ = write!(out, ",{part}_re,{part}_im");
    }
    if let Some(r) = m.reports.first() {
        for (s, _) in &r.hs_interval {
            let _ = write!(out, ",hs_interval_{s}");
        }
    }
    if let Some(row) = m.torus.first() {
        for (s, _) in row {
            let _ = write!(out, ",hs_torus_dw_{s}");
        }
    }
    out.push('\n');
    for (i, snap) in m.series.snapshots.iter().enumerate() {
        let r = &m.reports[i];
        let (v, v2) = m.velocity[i];
        let mut cells = vec![e(snap.t), e(r.l2), e(v), e(v2)];
        let tr = &r.traces;
        let dphi = snap.solution.dphi_bdry;
        for z in [dphi.0, dphi.1, tr.du0, tr.du1, tr.d2u0, tr.d2u1] {
            cells.push(e(z.re));
            cells.push(e(z.im));
        }
        cells.extend(r.hs_interval.iter().map(|p| e(p.1)));
        cells.extend(m.torus[i].iter().map(|p| e(p.1)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn evolve_experiment(cfg: &RunConfig) -> Result<Outcome, ExperimentError> {
    let (grid, coeffs, data) = setup(cfg)?;
    let spec = run_spec(cfg);
    let scan = cfg.kind == ExperimentKind::Scan;
    let results: Vec<(ModeSummary, String)> = cfg
        .k
        .par_iter()
        .map(|&k| {
            let m = mode_run(k, data, &coeffs, &grid, &spec, &cfg.s_grid, &cfg.torus_s)?;
            Ok((summarize_mode(&m, data, &coeffs, &spec, &grid, scan)?, mode_table(&m)))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let mut tables = Vec::new();
    let mut modes = Vec::new();
    for (summary, table) in results {
        tables.push((format!("run_k{}.csv", k_label(summary.k)), table));
        modes.push(summary);
    }
    Ok(Outcome {
        summary: json!({ "modes": modes }),
        tables,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencySummary {
    pub wavenumbers: Vec<f64>,
    pub fit: Option<RateFit>,
    pub samples: Vec<(f64, f64)>,
}

/// Mirror of a run for real initial data: the `−k` mode is the conjugate.
pub fn conjugate_partner(series: &RunSeries) -> RunSeries {
    let mut out = series.clone();
    out.k = -series.k;
    out.initial.iter_mut().for_each(|z| *z = z.conj());
    for snap in &mut out.snapshots {
        snap.w.iter_mut().for_each(|z| *z = z.conj());
        snap.solution.phi.iter_mut().for_each(|z| *z = z.conj());
        snap.solution.shifted_d.iter_mut().for_each(|z| *z = z.conj());
        snap.solution.dphi_bdry = (snap.solution.dphi_bdry.0.conj(), snap.solution.dphi_bdry.1.conj());
        snap.solution.k = -snap.solution.k;
    }
    out
}

/// Residual of the real bundle `{±k}` built from runs at the given
/// positive wavenumbers, with a power-law fit over `[10, t_end]`.
pub fn consistency_from_runs(
    runs: &[RunSeries],
    coeffs: &CoefficientPair,
    grid: &Grid,
    nx: usize,
    t_end: f64,
) -> Result<ConsistencySummary, ExperimentError> {
    let mirrors: Vec<RunSeries> = runs.iter().map(conjugate_partner).collect();
    let bundle: Vec<&RunSeries> = runs.iter().chain(&mirrors).collect();
    let samples = consistency_residual(&bundle, coeffs, grid, nx)?;
    let (ts, vs): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    Ok(ConsistencySummary {
        wavenumbers: bundle.iter().map(|r| r.k).collect(),
        fit: fit_power_law(&ts, &vs, (10.0, t_end)).ok(),
        samples,
    })
}

fn consistency_experiment(cfg: &RunConfig) -> Result<Outcome, ExperimentError> {
    let (grid, coeffs, data) = setup(cfg)?;
    let spec = run_spec(cfg);
    let mut ks: Vec<f64> = cfg.k.iter().map(|k| k.abs()).collect();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    let runs: Vec<RunSeries> = ks
        .par_iter()
        .map(|&k| Ok(run(data.sample(&grid), &ModeSystem::new(k, &coeffs, &grid)?, &spec)?))
        .collect::<Result<_, ExperimentError>>()?;
    let summary = consistency_from_runs(&runs, &coeffs, &grid, cfg.nx, cfg.t_end)?;
    let mut table = String::from("t,residual\n");
    for (t, r) in &summary.samples {
        let _ = writeln!(table, "{},{}", e(*t), e(*r));
    }
    Ok(Outcome {
        summary: json!({ "wavenumbers": summary.wavenumbers, "fit": summary.fit }),
        tables: vec![("residual.csv".into(), table)],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FormulaRow {
    pub t: f64,
    pub direct: [f64; 4],
    pub formula: [f64; 4],
    /// Wall-derivative mismatch relative to the larger direct value.
    pub boundary_rel: f64,
    /// Sup-norm mismatch of `H¹` against its homogeneous expansion,
    /// relative to `sup |H¹|`.
    pub expansion_rel: f64,
}

/// Compares the homogeneous-solution formulas with direct solves for fixed
/// data `w` at each time in `times`.
pub fn formula_check(
    k: f64,
    w: &[Complex64],
    coeffs: &CoefficientPair,
    grid: &Grid,
    times: &[f64],
) -> Result<Vec<FormulaRow>, ExperimentError> {
    let pair = homogeneous_pair(k, coeffs, grid)?;
    times
        .iter()
        .map(|&t| {
            let sol = solve_dirichlet(w, k, t, coeffs, grid)?;
            let (f0, f1) = boundary_derivative_formula(w, t, &pair, coeffs, grid)?;
            let (d0, d1) = sol.dphi_bdry;
            let scale = d0.norm().max(d1.norm()).max(f64::MIN_POSITIVE);
            let boundary_rel = (f0 - d0).norm().max((f1 - d1).norm()) / scale;
            let (_, h1) = split_first_derivative(&sol, w, coeffs, grid)?;
            let expansion = homogeneous_expansion(sol.dphi_bdry, t, &pair, grid);
            let h_max = h1.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
            let expansion_rel = h1.iter().zip(&expansion).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / h_max;
            Ok(FormulaRow {
                t,
                direct: [d0.re, d0.im, d1.re, d1.im],
                formula: [f0.re, f0.im, f1.re, f1.im],
                boundary_rel,
                expansion_rel,
            })
        })
        .collect()
}

fn formula_experiment(cfg: &RunConfig) -> Result<Outcome, ExperimentError> {
    let (grid, coeffs, data) = setup(cfg)?;
    let times = run_spec(cfg).snapshot_times();
    let w = data.sample(&grid);
    let per_k: Vec<(f64, Vec<FormulaRow>)> = cfg
        .k
        .par_iter()
        .map(|&k| Ok((k, formula_check(k, &w, &coeffs, &grid, &times)?)))
        .collect::<Result<_, ExperimentError>>()?;
    let mut tables = Vec::new();
    let mut modes = Vec::new();
    for (k, rows) in per_k {
        let mut table = String::from("t,direct0_re,direct0_im,direct1_re,direct1_im,formula0_re,formula0_im,formula1_re,formula1_im,boundary_rel,expansion_rel\n");
        for r in &rows {
            let cells: Vec<String> = std::iter::once(r.t)
                .chain(r.direct)
                .chain(r.formula)
                .chain([r.boundary_rel, r.expansion_rel])
                .map(e)
                .collect();
            table.push_str(&cells.join(","));
            table.push('\n');
        }
        tables.push((format!("formula_k{}.csv", k_label(k)), table));
        modes.push(json!({
            "k": k,
            "max_boundary_rel": rows.iter().map(|r| r.boundary_rel).fold(0.0, f64::max),
            "max_expansion_rel": rows.iter().map(|r| r.expansion_rel).fold(0.0, f64::max),
        }));
    }
    Ok(Outcome {
        summary: json!({ "flow": cfg.flow.name, "modes": modes }),
        tables,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstantModelSuite {
    pub draws: usize,
    /// Largest `|simulated − exact| / |exact|`.
    pub max_rel_error: f64,
    /// Largest `log|multiplier| / (|c|π/(|k||d|))`.
    pub max_bound_ratio: f64,
}

/// RK4 steps keeping the model integration well below `1e-8` relative.
pub fn constant_model_steps(p: &ConstantModelParams, t: f64) -> usize {
    let stiff = p.d.abs().max(1.0) * (p.c.norm() / p.k.abs()).max(1.0);
    ((t * stiff * 80.0).ceil() as usize).max(64)
}

/// Seeded draws of `(c, d, k, η, t)` compared with the closed form and
/// the uniform multiplier bound.
pub fn constant_model_suite(seed: u64, draws: usize) -> ConstantModelSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_error: f64 = 0.0;
    let mut max_bound_ratio: f64 = 0.0;
    for _ in 0..draws {
        let c = Complex64::from_polar(rng.random_range(0.0..3.0), rng.random_range(0.0..2.0 * PI));
        let sign = |r: &mut ChaCha8Rng| if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let d = sign(&mut rng) * rng.random_range(0.2..5.0);
        let k = sign(&mut rng) * rng.random_range(0.25..4.0);
        let eta = rng.random_range(-20.0..20.0);
        let t = rng.random_range(0.0..60.0);
        let p = ConstantModelParams::new(c, d, k, eta).expect("nonzero d and k");
        let exact = constant_model_exact(&p, t);
        let sim = constant_model_simulate(&p, t, constant_model_steps(&p, t));
        max_rel_error = max_rel_error.max((sim - exact).norm() / exact.norm());
        let bound = p.log_bound();
        if bound > 0.0 {
            max_bound_ratio = max_bound_ratio.max(exact.norm().ln() / bound);
        }
    }
    ConstantModelSuite {
        draws,
        max_rel_error,
        max_bound_ratio,
    }
}

fn constant_model_experiment(cfg: &RunConfig) -> Outcome {
    let suite = constant_model_suite(0, 10_000);
    // one trajectory for plotting
    let p = ConstantModelParams::new(Complex64::new(1.0, 0.0), 1.0, cfg.k[0], 10.0 * cfg.k[0]).expect("valid");
    let mut table = String::from("t,exact_re,exact_im,simulated_re,simulated_im\n");
    for j in 0..=200 {
        let t = 0.1 * j as f64;
        let a = constant_model_exact(&p, t);
        let b = constant_model_simulate(&p, t, constant_model_steps(&p, t));
        let _ = writeln!(table, "{},{},{},{},{}", e(t), e(a.re), e(a.im), e(b.re), e(b.im));
    }
    Outcome {
        summary: json!({ "suite": suite }),
        tables: vec![("trajectory.csv".into(), table)],
    }
}

fn asymptotics_experiment(cfg: &RunConfig) -> Result<Outcome, ExperimentError> {
    let sw = &cfg.sweep;
    let rows = envelope_sweep(&sw.s, &sw.k, &sw.y, &sw.t)?;
    let mut exact_defect: f64 = 0.0;
    for &s in &sw.s {
        for &t in &sw.t {
            let v = cs_integral(1.0, 0.0, s, t)?.value;
            let closed = if s == 0.0 { t.ln() } else { (t.powf(s) - 1.0) / s };
            exact_defect = exact_defect.max((v - closed).norm() / closed.abs());
        }
    }
    let limits: Vec<Value> = (1..10)
        .map(|j| {
            let s = 0.1 * j as f64;
            cs_limit_constant(s).map(|c| json!({ "s": s, "re": c.re, "im": c.im }))
        })
        .collect::<Result<_, _>>()?;
    let mut lp = Vec::new();
    for j in 2..=8 {
        let s = 0.1 * j as f64;
        for p in 1..=6 {
            let m = lp_membership(s, p as f64)?;
            lp.push(json!({ "s": s, "p": p, "convergent": m.verdict == Membership::Convergent, "sum": m.sum }));
        }
    }
    let mut table = String::from("s,k,y,T,abs_value,envelope,upper_ratio,lower_ratio\n");
    for r in &rows {
        let lower = r.lower_ratio.map(e).unwrap_or_default();
        let _ = writeln!(table, "{},{},{},{},{},{},{},{}", r.s, r.k, r.y, r.t_upper, e(r.abs_value), e(r.envelope), e(r.upper_ratio), lower);
    }
    Ok(Outcome {
        summary: json!({
            "y0_relative_defect": exact_defect,
            "envelope_constant": envelope_constant(&rows),
            "limit_constants": limits,
            "lp_membership": lp,
        }),
        tables: vec![("envelope.csv".into(), table)],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormSuites {
    pub parseval_max_rel: f64,
    pub monotone_in_s: bool,
    /// `(s, min B_n, max B_n, min ratio, max ratio, violations)` of kernel
    /// over Fourier seminorm.
    pub equivalence: Vec<(f64, f64, f64, f64, f64, usize)>,
    /// Largest `ratio / ‖g‖_{W^{1,∞}}`.
    pub lipschitz_max_rel: f64,
    /// Largest per-sample constant on the calibration corpus; negative
    /// when the estimate holds without the `L²` correction.
    pub commutator_estimate: f64,
    /// Constant held fixed on the test corpus.
    pub commutator_c: f64,
    pub commutator_violations: usize,
}

pub const SUITE_LEN: usize = 256;
pub const SUITE_BAND: usize = 12;

/// Parseval, kernel–Fourier equivalence, Lipschitz-multiplier and
/// commutator suites on seeded band-limited corpora.
pub fn norm_suites(equivalence_count: usize, corpus_count: usize) -> Result<NormSuites, NormError> {
    let samples = corpus::band_limited(11, corpus_count, SUITE_LEN, SUITE_BAND);
    let mut parseval_max_rel: f64 = 0.0;
    let mut monotone_in_s = true;
    for u in &samples {
        let l2: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>() / SUITE_LEN as f64;
        parseval_max_rel = parseval_max_rel.max((hs_torus(u, 0.0)? - l2).abs() / l2);
        let mut prev = 0.0;
        for j in 0..10 {
            let v = hs_torus(u, 0.1 * j as f64)?;
            monotone_in_s &= v >= prev * (1.0 - 1e-12);
            prev = v;
        }
    }
    let eq_samples = corpus::band_limited(12, equivalence_count, SUITE_LEN, SUITE_BAND);
    let mut equivalence = Vec::new();
    for s in [0.1, 0.25, 0.4] {
        let bn = bn_constants(s, SUITE_BAND)?;
        let (mut lo, mut hi, mut bad) = (f64::INFINITY, 0.0f64, 0usize);
        for u in &eq_samples {
            let r = torus_kernel_seminorm(u, s)? / torus_fourier_seminorm(u, s)?;
            lo = lo.min(r);
            hi = hi.max(r);
            if r < bn.min || r > bn.max {
                bad += 1;
            }
        }
        equivalence.push((s, bn.min, bn.max, lo, hi, bad));
    }
    let g = corpus::periodic(SUITE_LEN, |y| Complex64::new(1.0 + 0.1 * (2.0 * PI * y).sin(), 0.0));
    let bound = w1inf_norm(&g)?;
    let mut lipschitz_max_rel: f64 = 0.0;
    for u in &samples {
        lipschitz_max_rel = lipschitz_max_rel.max(lipschitz_multiplier_check(&g, u, 0.3)? / bound);
    }
    // Estimate C on one corpus, then hold it on another. Both are
    // concentrated near the minimum of g² at y = 3/4, where the estimate
    // is sharpest.
    let g2: Vec<Complex64> = g.iter().map(|z| z * z).collect();
    let localized = |seed| {
        let envelope = corpus::periodic(SUITE_LEN, |y| Complex64::new((0.5 + 0.5 * (2.0 * PI * (y - 0.75)).cos()).powi(4), 0.0));
        corpus::band_limited(seed, corpus_count, SUITE_LEN, SUITE_BAND / 2)
            .into_iter()
            .map(|u| u.iter().zip(&envelope).map(|(a, b)| a * b).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let mut commutator_estimate = f64::NEG_INFINITY;
    for u in &localized(13) {
        commutator_estimate = commutator_estimate.max(commutator_constant(&g2, u, 0.3)?);
    }
    let commutator_c = 2.0 * commutator_estimate.max(0.0);
    let mut commutator_violations = 0;
    for u in &localized(14) {
        if commutator_constant(&g2, u, 0.3)? > commutator_c {
            commutator_violations += 1;
        }
    }
    Ok(NormSuites {
        parseval_max_rel,
        monotone_in_s,
        equivalence,
        lipschitz_max_rel,
        commutator_estimate,
        commutator_c,
        commutator_violations,
    })
}

fn norms_experiment() -> Result<Outcome, ExperimentError> {
    let suites = norm_suites(50, 100)?;
    let mut table = String::from("s,n,b_n\n");
    for s in [0.1, 0.25, 0.4] {
        for (j, b) in bn_constants(s, 64)?.values.iter().enumerate() {
            let _ = writeln!(table, "{s},{},{}", j + 1, e(*b));
        }
    }
    Ok(Outcome {
        summary: json!({ "suites": suites }),
        tables: vec![("bn_constants.csv".into(), table)],
    })
}

/// Matplotlib script plotting every column of every table against the
/// first one on log-log axes.
pub fn plot_script(tables: &[(String, String)]) -> String {
    let names: Vec<String> = tables.iter().map(|(n, _)| format!("{n:?}")).collect();
    format!(
        r#"import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
TABLES = [{}]

for name in TABLES:
    with open(os.path.join(HERE, name)) as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = list(zip(*body))
    x = [float(v) for v in cols[0]]
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, col in zip(header[1:], cols[1:]):
        y = [abs(float(v)) if v else float("nan") for v in col]
        pts = [(a, b) for a, b in zip(x, y) if a > 0 and b > 0]
        if pts:
            ax.loglog(*zip(*pts), label=label)
    ax.set_xlabel(header[0])
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, name.replace(".csv", ".png")), dpi=120)
"#,
        names.join(", ")
    )
}

/// One line per `summary.json` found under `out_root`, with the headline
/// numbers of each experiment.
pub fn report(out_root: &Path) -> Result<String, ExperimentError> {
    let read_dir = std::fs::read_dir(out_root).map_err(|source| ExperimentError::Io {
        path: out_root.to_path_buf(),
        source,
    })?;
    let mut dirs: Vec<PathBuf> = read_dir.filter_map(|d| d.ok().map(|d| d.path())).filter(|p| p.join("summary.json").is_file()).collect();
    dirs.sort();
    let mut out = String::new();
    for dir in dirs {
        let path = dir.join("summary.json");
        let text = std::fs::read_to_string(&path).map_err(|source| ExperimentError::Io { path: path.clone(), source })?;
        let v: Value = serde_json::from_str(&text).map_err(|err| ExperimentError::Summary {
            path: path.clone(),
            message: err.to_string(),
        })?;
        let name = v["name"].as_str().unwrap_or("?");
        let kind = v["kind"].as_str().unwrap_or("?");
        let _ = writeln!(out, "{name} [{kind}]");
        for line in headline(&v["results"]) {
            let _ = writeln!(out, "  {line}");
        }
    }
    Ok(out)
}

fn alpha(v: &Value) -> String {
    match v.get("alpha").and_then(Value::as_f64) {
        Some(a) => format!("{a:.3} (r2 {:.4})", v["r2"].as_f64().unwrap_or(f64::NAN)),
        None => "n/a".into(),
    }
}

fn headline(r: &Value) -> Vec<String> {
    let mut lines = Vec::new();
    if let Some(modes) = r["modes"].as_array() {
        for m in modes {
            let k = m["k"].as_f64().unwrap_or(f64::NAN);
            if m.get("max_boundary_rel").is_some() {
                lines.push(format!(
                    "k={k}: boundary formula rel {:.2e}, expansion rel {:.2e}",
                    m["max_boundary_rel"].as_f64().unwrap_or(f64::NAN),
                    m["max_expansion_rel"].as_f64().unwrap_or(f64::NAN)
                ));
                continue;
            }
            lines.push(format!(
                "k={k}: |dphi(0)| {}, velocity {}, v2 {}, scattering {}",
                alpha(&m["dphi0_fit"]),
                alpha(&m["velocity_full_fit"]),
                alpha(&m["velocity_v2_fit"]),
                alpha(&m["scattering_fit"])
            ));
            let w = &m["wall"];
            lines.push(format!(
                "  wall dW log slopes {} / {} (predicted {:.3} / {:.3})",
                alpha(&w["dw_log_fits"][0]),
                alpha(&w["dw_log_fits"][1]),
                w["dw_predicted_slopes"][0].as_f64().unwrap_or(f64::NAN),
                w["dw_predicted_slopes"][1].as_f64().unwrap_or(f64::NAN)
            ));
            if let Some(scan) = m["scan"].as_array() {
                let verdicts: Vec<String> = scan
                    .iter()
                    .map(|e| format!("{}:{}", e["s"], e["verdict"].as_str().unwrap_or("?")))
                    .collect();
                lines.push(format!("  scan {}", verdicts.join(" ")));
            }
        }
    }
    if r.get("wavenumbers").is_some() {
        lines.push(format!("residual {}", alpha(&r["fit"])));
    }
    if let Some(s) = r.get("suite") {
        lines.push(format!("constant model: {s}"));
    }
    if let Some(c) = r.get("envelope_constant") {
        lines.push(format!("envelope constant {c}, y=0 defect {}", r["y0_relative_defect"]));
    }
    if let Some(s) = r.get("suites") {
        lines.push(format!("norm suites: {s}"));
    }
    lines
}

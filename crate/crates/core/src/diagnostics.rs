//! Rate fits, critical-exponent scans, velocity norms, the nonlinear
//! consistency residual and wall-trace monitors.

use crate::elliptic::EllipticSolution;
use crate::evolve::RunSeries;
use crate::grid::Grid;
use crate::profiles::CoefficientPair;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("power-law fit needs positive values; found {value} at t = {t}")]
    NonPositiveValues { t: f64, value: f64 },
    #[error("need at least 8 samples in the window, got {0}")]
    InsufficientSamples(usize),
    #[error("fit window [{0}, {1}] spans less than one decade")]
    WindowTooNarrow(f64, f64),
    #[error("times and values differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("runs in the bundle do not share one snapshot schedule")]
    ScheduleMismatch,
    #[error("bundle is empty")]
    EmptyBundle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `v ≈ A t^α`.
    PowerLaw,
    /// `v ≈ α log t + β`.
    LogGrowth,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub model: FitModel,
    pub alpha: f64,
    pub intercept: f64,
    /// Standard error of `alpha`.
    pub alpha_stderr: f64,
    pub r2: f64,
    /// First and last sample time used.
    pub window: (f64, f64),
    pub samples: usize,
}

fn select(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>), FitError> {
    if times.len() != values.len() {
        return Err(FitError::LengthMismatch(times.len(), values.len()));
    }
    let tol = 1e-9;
    let (ts, vs): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 * (1.0 - tol) && **t <= window.1 * (1.0 + tol))
        .map(|(t, v)| (*t, *v))
        .unzip();
    if ts.len() < 8 {
        return Err(FitError::InsufficientSamples(ts.len()));
    }
    let (lo, hi) = (ts[0], ts[ts.len() - 1]);
    if !(lo > 0.0) || hi / lo < 10.0 * (1.0 - tol) {
        return Err(FitError::WindowTooNarrow(lo, hi));
    }
    Ok((ts, vs))
}

fn least_squares(x: &[f64], y: &[f64], model: FitModel, window: (f64, f64)) -> RateFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - alpha * a).powi(2)).sum();
    let r2 = if syy <= 1e-300 || ssr <= 1e-28 * syy {
        1.0
    } else {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    };
    let alpha_stderr = (ssr / (n - 2.0) / sxx).sqrt();
    RateFit {
        model,
        alpha,
        intercept,
        alpha_stderr,
        r2,
        window,
        samples: x.len(),
    }
}

/// Least squares on `(log t, log v)` over the samples inside `window`.
pub fn fit_power_law(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit, FitError> {
    let (ts, vs) = select(times, values, window)?;
    if let Some((t, v)) = ts.iter().zip(&vs).find(|(_, v)| !(**v > 0.0)) {
        return Err(FitError::NonPositiveValues { t: *t, value: *v });
    }
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&x, &y, FitModel::PowerLaw, (ts[0], ts[ts.len() - 1])))
}

/// Least squares on `(log t, v)` over the samples inside `window`.
pub fn fit_log_growth(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit, FitError> {
    let (ts, vs) = select(times, values, window)?;
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    Ok(least_squares(&x, &vs, FitModel::LogGrowth, (ts[0], ts[ts.len() - 1])))
}

/// `(‖v − ⟨v⟩ₓ‖_{L²}, ‖v₂‖_{L²})` of one mode, with `|v₂| = |Φ|/|k|` and
/// `|v₁| = g |(∂_y/k + it)Φ| / |k|`, integrated against `dy = dz/g`.
pub fn velocity_norms(solution: &EllipticSolution, coeffs: &CoefficientPair, grid: &Grid) -> (f64, f64) {
    let k = solution.k.abs();
    let mut v1 = 0.0;
    let mut v2 = 0.0;
    for (i, w) in grid.quad_weights().iter().enumerate() {
        let g = coeffs.g[i];
        v2 += w / g * solution.phi[i].norm_sqr();
        v1 += w * g * solution.shifted_d[i].norm_sqr();
    }
    (((v1 + v2) / (k * k)).sqrt(), (v2 / (k * k)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanEntry {
    pub s: f64,
    pub verdict: Verdict,
    pub fit: Option<RateFit>,
    /// Power-law fit over the same window, which catches growth faster
    /// than logarithmic.
    pub power_fit: Option<RateFit>,
    /// Max over median of the norm during the last decade.
    pub last_decade_ratio: f64,
    pub growth_test: bool,
    pub bounded_test: bool,
}

/// Classifies each norm series as bounded or growing.
///
/// Growing: the log-growth or the power-law fit over `t ≥ 1` has
/// `α > 3σ_α` and `r² ≥ 0.9`.
/// Bounded: the last decade has max/median `≤ 1.1`. Both or neither give
/// Inconclusive, and a "bounded" verdict above the smallest "growing" `s`
/// is downgraded to Inconclusive.
pub fn critical_scan(times: &[f64], series: &[(f64, Vec<f64>)]) -> Result<Vec<ScanEntry>, FitError> {
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let t_start = times.iter().copied().filter(|&t| t >= 1.0).fold(f64::INFINITY, f64::min);
    if !(t_end / t_start >= 10f64.powf(2.5) * (1.0 - 1e-9)) {
        return Err(FitError::WindowTooNarrow(t_start, t_end));
    }
    let mut out = Vec::with_capacity(series.len());
    for (s, values) in series {
        let fit = fit_log_growth(times, values, (t_start, t_end))?;
        let power_fit = fit_power_law(times, values, (t_start, t_end)).ok();
        let grows = |f: &RateFit| f.alpha > 3.0 * f.alpha_stderr && f.r2 >= 0.9;
        let growth_test = grows(&fit) || power_fit.as_ref().is_some_and(grows);
        let mut last: Vec<f64> = times
            .iter()
            .zip(values)
            .filter(|(t, _)| **t >= t_end / 10.0 * (1.0 - 1e-9))
            .map(|(_, v)| *v)
            .collect();
        last.sort_by(f64::total_cmp);
        let median = if last.len() % 2 == 1 {
            last[last.len() / 2]
        } else {
            0.5 * (last[last.len() / 2 - 1] + last[last.len() / 2])
        };
        let ratio = last[last.len() - 1] / median;
        let bounded_test = ratio <= 1.1;
        let verdict = match (growth_test, bounded_test) {
            (true, false) => Verdict::Growing,
            (false, true) => Verdict::Bounded,
            _ => Verdict::Inconclusive,
        };
        out.push(ScanEntry {
            s: *s,
            verdict,
            fit: Some(fit),
            power_fit,
            last_decade_ratio: ratio,
            growth_test,
            bounded_test,
        });
    }
    enforce_monotone(&mut out);
    Ok(out)
}

fn enforce_monotone(entries: &mut [ScanEntry]) {
    let first_growing = entries
        .iter()
        .filter(|e| e.verdict == Verdict::Growing)
        .map(|e| e.s)
        .fold(f64::INFINITY, f64::min);
    for e in entries.iter_mut() {
        if e.verdict == Verdict::Bounded && e.s > first_growing {
            e.verdict = Verdict::Inconclusive;
        }
    }
}

/// `(t, ‖g(∂_xΦ ∂_zW − ∂_zΦ ∂_xW)‖_{L²})` assembled from the modes of a
/// real-valued bundle, `W = Σ_k W_k e^{−ikx}`, stream function `Φ_k/k²`,
/// on `nx` equispaced points of one period in `x`.
pub fn consistency_residual(
    bundle: &[&RunSeries],
    coeffs: &CoefficientPair,
    grid: &Grid,
    nx: usize,
) -> Result<Vec<(f64, f64)>, DiagnosticsError> {
    let first = bundle.first().ok_or(DiagnosticsError::EmptyBundle)?;
    let times = first.times();
    if bundle.iter().any(|r| r.times() != times) {
        return Err(DiagnosticsError::ScheduleMismatch);
    }
    let i = Complex64::new(0.0, 1.0);
    let n = grid.len();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(times.len());
    for (idx, &t) in times.iter().enumerate() {
        // per mode: W, ∂zW, Φ_old, ∂zΦ_old
        let modes: Vec<(f64, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> = bundle
            .iter()
            .map(|r| {
                let snap = &r.snapshots[idx];
                let k2 = r.k * r.k;
                let phi: Vec<Complex64> = snap.solution.phi.iter().map(|p| p / k2).collect();
                (r.k, snap.w.clone(), grid.diff(&snap.w), grid.diff(&phi), phi)
            })
            .collect();
        let mut total = 0.0;
        for jx in 0..nx {
            let x = two_pi * jx as f64 / nx as f64;
            for zi in 0..n {
                let (mut wx, mut wz, mut px, mut pz) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
                for (k, w, dw, dphi, phi) in &modes {
                    let e = Complex64::from_polar(1.0, -k * x);
                    wx += -i * *k * w[zi] * e;
                    wz += dw[zi] * e;
                    px += -i * *k * phi[zi] * e;
                    pz += dphi[zi] * e;
                }
                let r = coeffs.g[zi] * (px * wz - pz * wx);
                total += grid.quad_weights()[zi] * r.norm_sqr() / nx as f64;
            }
        }
        out.push((t, total.sqrt()));
    }
    Ok(out)
}

/// Wall traces of `∂_yW` and `∂_y²W` with their log-growth fits.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryMonitor {
    pub times: Vec<f64>,
    pub dw0: Vec<Complex64>,
    pub dw1: Vec<Complex64>,
    pub d2w0: Vec<Complex64>,
    pub d2w1: Vec<Complex64>,
    /// Fits of `|∂_yW|` at the two walls.
    pub dw_fits: (Option<RateFit>, Option<RateFit>),
    /// Fits of `|∂_y²W|` at the two walls.
    pub d2w_fits: (Option<RateFit>, Option<RateFit>),
    /// For zero-Dirichlet data: last values of `∂_yW`, reported as limits when
    /// the decade increments contract.
    pub limits: Option<(Complex64, Complex64)>,
    pub dw_converged: bool,
}

/// Ratio of successive per-decade increments `|a(10t) − a(t)|`; convergence
/// means every ratio is at most 0.5.
pub fn decade_increments(times: &[f64], values: &[Complex64]) -> Vec<f64> {
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let mut marks = Vec::new();
    let mut t = t_end;
    while t >= 1.0 * (1.0 - 1e-9) {
        marks.push(t);
        t /= 10.0;
    }
    marks.reverse();
    let at = |target: f64| {
        let idx = times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        values[idx]
    };
    marks.windows(2).map(|w| (at(w[1]) - at(w[0])).norm()).collect()
}

fn converged(times: &[f64], values: &[Complex64]) -> bool {
    let inc = decade_increments(times, values);
    inc.len() >= 2 && inc.windows(2).all(|w| w[1] <= 0.5 * w[0] || w[1] <= 1e-12)
}

/// Builds the wall monitor from a run, fitting over `t ∈ [10, t_end]`.
pub fn boundary_singularity_monitor(series: &RunSeries, zero_dirichlet: bool) -> BoundaryMonitor {
    let snaps: Vec<_> = series.snapshots.iter().filter(|s| s.t >= 1.0).collect();
    let times: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let pick = |f: &dyn Fn(usize) -> Complex64| -> Vec<Complex64> {
        snaps
            .iter()
            .map(|s| {
                let idx = series.wall.t.partition_point(|&t| t < s.t - 1e-9 * s.t);
                f(idx.min(series.wall.t.len() - 1))
            })
            .collect()
    };
    let dw0 = pick(&|i| series.wall.dw[i].0);
    let dw1 = pick(&|i| series.wall.dw[i].1);
    let d2w0 = pick(&|i| series.wall.d2w[i].0);
    let d2w1 = pick(&|i| series.wall.d2w[i].1);
    let t_end = times.last().copied().unwrap_or(0.0);
    let fit = |v: &[Complex64]| {
        let mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        fit_log_growth(&times, &mags, (10.0, t_end)).ok()
    };
    let dw_converged = converged(&times, &dw0) && converged(&times, &dw1);
    let limits = if zero_dirichlet && dw_converged {
        Some((dw0[dw0.len() - 1], dw1[dw1.len() - 1]))
    } else {
        None
    };
    BoundaryMonitor {
        dw_fits: (fit(&dw0), fit(&dw1)),
        d2w_fits: (fit(&d2w0), fit(&d2w1)),
        times,
        dw0,
        dw1,
        d2w0,
        d2w1,
        limits,
        dw_converged,
    }
}

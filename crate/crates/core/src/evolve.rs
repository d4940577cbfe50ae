//! Per-mode evolution `∂_t W = -(if/k) Φ`, the constant-coefficient model
//! and scattering-profile extraction.

use crate::diagnostics::{fit_power_law, FitError, RateFit};
use crate::elliptic::{EllipticError, EllipticSolution, ModeOperator};
use crate::grid::{Grid, GridError};
use crate::profiles::CoefficientPair;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("time step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("t_end = {t_end} must exceed the start time {t0}")]
    InvalidHorizon { t0: f64, t_end: f64 },
    #[error("series spans {0:.2} decades; at least two are needed")]
    InsufficientSpan(f64),
    #[error("unknown initial data `{0}`")]
    UnknownInitialData(String),
    #[error("invalid constant-model parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Vorticity samples of one mode at one time.
#[derive(Debug, Clone)]
pub struct ModeState {
    pub w: Vec<Complex64>,
    pub t: f64,
    pub k: f64,
    pub step_count: u64,
    /// Sum over steps of `dt · ‖k₂ − k₃‖∞`, a cheap local-error indicator.
    pub error_estimate: f64,
}

impl ModeState {
    pub fn new(w: Vec<Complex64>, k: f64) -> Self {
        ModeState {
            w,
            t: 0.0,
            k,
            step_count: 0,
            error_estimate: 0.0,
        }
    }
}

/// Everything one mode needs to be advanced in time.
#[derive(Debug, Clone)]
pub struct ModeSystem<'a> {
    pub grid: &'a Grid,
    pub coeffs: &'a CoefficientPair,
    pub op: ModeOperator,
    f_over_k: Vec<f64>,
}

impl<'a> ModeSystem<'a> {
    pub fn new(k: f64, coeffs: &'a CoefficientPair, grid: &'a Grid) -> Result<Self, EvolveError> {
        let op = ModeOperator::new(k, coeffs, grid)?;
        let f_over_k = coeffs.f.iter().map(|f| f / k).collect();
        Ok(ModeSystem {
            grid,
            coeffs,
            op,
            f_over_k,
        })
    }

    pub fn k(&self) -> f64 {
        self.op.k()
    }

    fn rhs(&self, w: &[Complex64], t: f64) -> Vec<Complex64> {
        let phi = self.op.solve_phi(w, t);
        phi.iter().zip(&self.f_over_k).map(|(p, a)| -I * *a * p).collect()
    }

    /// Full elliptic solve at the state's time.
    pub fn solve(&self, state: &ModeState) -> Result<EllipticSolution, EvolveError> {
        Ok(self.op.solve(&state.w, state.t, self.coeffs, self.grid)?)
    }

    /// `C_bound = 1.5 exp(max|f| π / (|k| min g))`.
    pub fn l2_ceiling(&self) -> f64 {
        1.5 * (self.coeffs.max_abs_f() * std::f64::consts::PI / (self.k().abs() * self.coeffs.min_abs_g())).exp()
    }
}

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(y, x)| y + x * a).collect()
}

/// One classical RK4 step.
pub fn step(state: &ModeState, dt: f64, sys: &ModeSystem) -> Result<ModeState, EvolveError> {
    if !(dt > 0.0) {
        return Err(EvolveError::InvalidStep(dt));
    }
    let t = state.t;
    let w = &state.w;
    let k1 = sys.rhs(w, t);
    let k2 = sys.rhs(&axpy(w, 0.5 * dt, &k1), t + 0.5 * dt);
    let k3 = sys.rhs(&axpy(w, 0.5 * dt, &k2), t + 0.5 * dt);
    let k4 = sys.rhs(&axpy(w, dt, &k3), t + dt);
    let new_w = (0..w.len())
        .map(|i| w[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
        .collect();
    let indicator = k2.iter().zip(&k3).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) * dt;
    Ok(ModeState {
        w: new_w,
        t: t + dt,
        k: state.k,
        step_count: state.step_count + 1,
        error_estimate: state.error_estimate + indicator,
    })
}

/// Time stepping and sampling parameters of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub t_end: f64,
    pub dt0: f64,
    pub snapshots_per_decade: u32,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            t_end: 1e3,
            dt0: 0.5,
            snapshots_per_decade: 8,
        }
    }
}

impl RunSpec {
    /// `dt = min(dt₀, 0.5/|k|)`.
    pub fn dt(&self, k: f64) -> f64 {
        self.dt0.min(0.5 / k.abs())
    }

    /// `t = 0` followed by `10^{j/m}` for `j = 0, 1, ...` up to `t_end`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let m = self.snapshots_per_decade.max(1) as f64;
        let mut out = vec![0.0];
        let mut j = 0;
        loop {
            let t = 10f64.powf(j as f64 / m);
            if t > self.t_end * (1.0 + 1e-12) {
                break;
            }
            out.push(t);
            j += 1;
        }
        if (out[out.len() - 1] - self.t_end).abs() > 1e-9 * self.t_end {
            out.push(self.t_end);
        }
        out
    }
}

/// Snapshot of the state together with its stream function.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub w: Vec<Complex64>,
    pub solution: EllipticSolution,
}

/// Wall quantities recorded after every step.
#[derive(Debug, Clone, Default)]
pub struct WallSeries {
    pub t: Vec<f64>,
    /// `∂_yΦ` at the two walls (the wall values of `H¹`).
    pub dphi: Vec<(Complex64, Complex64)>,
    pub dw: Vec<(Complex64, Complex64)>,
    pub d2w: Vec<(Complex64, Complex64)>,
}

impl WallSeries {
    fn push(&mut self, t: f64, w: &[Complex64], sys: &ModeSystem) {
        let psi = sys.op.solve_gauge(w, t);
        let (p0, p1) = sys.grid.wall_derivatives(&psi);
        let phase = Complex64::from_polar(1.0, -sys.k() * t);
        self.t.push(t);
        self.dphi.push((p0, p1 * phase));
        self.dw.push(sys.grid.wall_derivatives(w));
        self.d2w.push(sys.grid.wall_second_derivatives(w));
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunSeries {
    pub k: f64,
    pub initial: Vec<Complex64>,
    pub snapshots: Vec<Snapshot>,
    pub wall: WallSeries,
    pub steps: u64,
    pub error_estimate: f64,
    pub l2_ceiling: f64,
    /// First snapshot time at which `‖W‖ > C_bound ‖ω₀‖`.
    pub ceiling_breach: Option<f64>,
}

impl RunSeries {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

/// Integrates one mode from `t = 0` to `spec.t_end`, landing exactly on
/// every snapshot time.
pub fn run(initial: Vec<Complex64>, sys: &ModeSystem, spec: &RunSpec) -> Result<RunSeries, EvolveError> {
    if !(spec.t_end > 0.0) {
        return Err(EvolveError::InvalidHorizon {
            t0: 0.0,
            t_end: spec.t_end,
        });
    }
    let dt = spec.dt(sys.k());
    if !(dt > 0.0) {
        return Err(EvolveError::InvalidStep(dt));
    }
    let grid = sys.grid;
    let norm0 = grid.l2_norm(&initial);
    let ceiling = sys.l2_ceiling();
    let mut state = ModeState::new(initial.clone(), sys.k());
    let mut wall = WallSeries::default();
    let mut snapshots = Vec::new();
    let mut breach = None;
    wall.push(0.0, &state.w, sys);
    for &target in &spec.snapshot_times() {
        while state.t < target - 1e-12 * target.max(1.0) {
            let h = dt.min(target - state.t);
            state = step(&state, h, sys)?;
            if (state.t - target).abs() <= 1e-12 * target.max(1.0) {
                state.t = target;
            }
            wall.push(state.t, &state.w, sys);
        }
        let solution = sys.solve(&state)?;
        if breach.is_none() && grid.l2_norm(&state.w) > ceiling * norm0 {
            log::warn!("L2 ceiling exceeded at t = {}", state.t);
            breach = Some(state.t);
        }
        snapshots.push(Snapshot {
            t: state.t,
            w: state.w.clone(),
            solution,
        });
    }
    Ok(RunSeries {
        k: sys.k(),
        initial,
        snapshots,
        wall,
        steps: state.step_count,
        error_estimate: state.error_estimate,
        l2_ceiling: ceiling,
        ceiling_breach: breach,
    })
}

/// Named initial vorticity profiles on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    /// `ω₀ ≡ 1`.
    Constant,
    /// `1 + cos(2πy)/2`, nonzero wall values with periodic derivatives.
    Cosine,
    /// `sin(πy)`.
    Sin,
    /// `sin²(πy)`, vanishing with its derivative at both walls.
    Sin2,
    /// `16 y²(1-y)²`.
    BumpZeroTrace,
    Zero,
}

impl InitialData {
    pub fn parse(name: &str) -> Result<Self, EvolveError> {
        Ok(match name {
            "constant" => Self::Constant,
            "cosine" => Self::Cosine,
            "sin" => Self::Sin,
            "sin2" => Self::Sin2,
            "bump-zero-trace" => Self::BumpZeroTrace,
            "zero" => Self::Zero,
            other => return Err(EvolveError::UnknownInitialData(other.to_string())),
        })
    }

    pub fn eval(self, y: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            Self::Constant => 1.0,
            Self::Cosine => 1.0 + 0.5 * (2.0 * PI * y).cos(),
            Self::Sin => (PI * y).sin(),
            Self::Sin2 => (PI * y).sin().powi(2),
            Self::BumpZeroTrace => 16.0 * y * y * (1.0 - y) * (1.0 - y),
            Self::Zero => 0.0,
        }
    }

    pub fn sample(self, grid: &Grid) -> Vec<Complex64> {
        grid.sample(|y| Complex64::new(self.eval(y), 0.0))
    }

    /// Whether the data vanishes at both walls.
    pub fn is_zero_dirichlet(self) -> bool {
        self.eval(0.0).abs() < 1e-14 && self.eval(1.0).abs() < 1e-14
    }
}

/// Parameters `c`, `d`, `k`, `η` of the model
/// `∂_t Λ = -(ic/k) Λ / (1 + d²(η/k - t)²)`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantModelParams {
    pub c: Complex64,
    pub d: f64,
    pub k: f64,
    pub eta: f64,
}

impl ConstantModelParams {
    pub fn new(c: Complex64, d: f64, k: f64, eta: f64) -> Result<Self, EvolveError> {
        if d == 0.0 {
            return Err(EvolveError::InvalidParams("d must be nonzero"));
        }
        if k == 0.0 {
            return Err(EvolveError::InvalidParams("k must be nonzero"));
        }
        Ok(ConstantModelParams { c, d, k, eta })
    }

    /// `|c| π / (|k||d|)`, the log of the uniform bound on the multiplier.
    pub fn log_bound(&self) -> f64 {
        self.c.norm() * std::f64::consts::PI / (self.k.abs() * self.d.abs())
    }

    pub fn rate(&self, t: f64) -> Complex64 {
        let x = self.d * (self.eta / self.k - t);
        -I * self.c / self.k / (1.0 + x * x)
    }
}

/// Closed-form multiplier `Λ(t)/Λ(0)` of the constant-coefficient model.
pub fn constant_model_exact(p: &ConstantModelParams, t: f64) -> Complex64 {
    let a = p.eta / p.k;
    let integral = ((p.d * a).atan() - (p.d * (a - t)).atan()) / p.d;
    (-I * p.c / p.k * integral).exp()
}

/// The same multiplier by RK4 with `steps` equal steps.
pub fn constant_model_simulate(p: &ConstantModelParams, t: f64, steps: usize) -> Complex64 {
    let h = t / steps as f64;
    let mut y = Complex64::new(1.0, 0.0);
    for j in 0..steps {
        let s = j as f64 * h;
        let k1 = p.rate(s) * y;
        let k2 = p.rate(s + 0.5 * h) * (y + k1 * (0.5 * h));
        let k3 = p.rate(s + 0.5 * h) * (y + k2 * (0.5 * h));
        let k4 = p.rate(s + h) * (y + k3 * h);
        y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    }
    y
}

/// Outcome of the scattering fit.
#[derive(Debug, Clone)]
pub enum ScatteringRate {
    Fitted(RateFit),
    /// All distances are below `1e-12 ‖W∞‖`.
    BelowNoiseFloor,
}

#[derive(Debug, Clone)]
pub struct ScatteringProfile {
    pub w_inf: Vec<Complex64>,
    /// `(t, ‖W(t) − W∞‖_{L²})` for the snapshots with `t ≥ 1`.
    pub distances: Vec<(f64, f64)>,
    pub rate: ScatteringRate,
}

/// Takes the final snapshot as `W∞` and fits a power law to
/// `‖W(t) − W∞‖_{L²}` over the first 80% of the snapshots with `t ≥ 1`.
pub fn scattering_profile(series: &RunSeries, grid: &Grid) -> Result<ScatteringProfile, EvolveError> {
    let snaps: Vec<&Snapshot> = series.snapshots.iter().filter(|s| s.t >= 1.0).collect();
    let span = match (snaps.first(), snaps.last()) {
        (Some(a), Some(b)) => (b.t / a.t).log10(),
        _ => 0.0,
    };
    if span < 2.0 - 1e-9 {
        return Err(EvolveError::InsufficientSpan(span));
    }
    let w_inf = snaps[snaps.len() - 1].w.clone();
    let distances: Vec<(f64, f64)> = snaps
        .iter()
        .map(|s| {
            let diff: Vec<Complex64> = s.w.iter().zip(&w_inf).map(|(a, b)| a - b).collect();
            (s.t, grid.l2_norm(&diff))
        })
        .collect();
    let floor = 1e-12 * grid.l2_norm(&w_inf).max(f64::MIN_POSITIVE);
    let used = ((distances.len() as f64) * 0.8).floor() as usize;
    let head = &distances[..used];
    let rate = if head.iter().all(|d| d.1 <= floor) {
        ScatteringRate::BelowNoiseFloor
    } else {
        let (ts, vs): (Vec<f64>, Vec<f64>) = head.iter().copied().unzip();
        let window = (ts[0], ts[ts.len() - 1]);
        ScatteringRate::Fitted(fit_power_law(&ts, &vs, window)?)
    };
    Ok(ScatteringProfile {
        w_inf,
        distances,
        rate,
    })
}

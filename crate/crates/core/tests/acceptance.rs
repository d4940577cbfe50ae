//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use channel_damping::asymptotics::{cs_integral, cs_limit_constant, envelope_constant, envelope_sweep, lp_membership, Membership};
use channel_damping::config::{recommended_nodes, SweepSpec};
use channel_damping::diagnostics::{fit_power_law, Verdict};
use channel_damping::elliptic::solve_dirichlet;
use channel_damping::evolve::{InitialData, RunSpec};
use channel_damping::experiment::{
    constant_model_suite, consistency_from_runs, formula_check, mode_run, norm_suites, summarize_mode, ModeSummary,
};
use channel_damping::grid::Grid;
use channel_damping::profiles::{build_coefficients, CoefficientPair, ShearProfile};
use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::process::ExitCode;
use std::time::Instant;

const T_END: f64 = 1e3;

struct Gate {
    failures: usize,
}

impl Gate {
    fn check(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        println!("criterion {id:>2} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures += 1;
        }
    }
}

fn grid() -> Grid {
    Grid::new(recommended_nodes(1.0, T_END), 12).unwrap()
}

fn quadratic(n: usize) -> CoefficientPair {
    build_coefficients(&ShearProfile::quadratic(0.25).unwrap(), n).unwrap()
}

struct Runs {
    general: ModeSummary,
    zero: ModeSummary,
    zero_series: channel_damping::evolve::RunSeries,
}

fn shared_runs(grid: &Grid, coeffs: &CoefficientPair) -> Runs {
    let spec = RunSpec::default();
    let general = mode_run(1.0, InitialData::Constant, coeffs, grid, &spec, &[1.25, 1.75], &[0.4]).unwrap();
    let zero = mode_run(1.0, InitialData::Sin, coeffs, grid, &spec, &[2.25, 2.75], &[]).unwrap();
    Runs {
        general: summarize_mode(&general, InitialData::Constant, coeffs, &spec, grid, true).unwrap(),
        zero: summarize_mode(&zero, InitialData::Sin, coeffs, &spec, grid, true).unwrap(),
        zero_series: zero.series,
    }
}

fn verdict(s: &ModeSummary, at: f64) -> Option<Verdict> {
    s.scan.as_ref()?.iter().find(|e| (e.s - at).abs() < 1e-12).map(|e| e.verdict)
}

fn couette(gate: &mut Gate, grid: &Grid) {
    let coeffs = build_coefficients(&ShearProfile::couette(), grid.len()).unwrap();
    let w = InitialData::Constant.sample(grid);
    let (mut ts, mut mags, mut scaled) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..=32 {
        let t = 10f64.powf(1.0 + 2.0 * j as f64 / 32.0);
        let d0 = solve_dirichlet(&w, 1.0, t, &coeffs, grid).unwrap().dphi_bdry.0;
        ts.push(t);
        mags.push(d0.norm());
        scaled.push(t * t * (d0 - 1.0 / Complex64::new(0.0, t)).norm());
    }
    let fit = fit_power_law(&ts, &mags, (10.0, T_END)).unwrap();
    let c_early = scaled[..=16].iter().copied().fold(0.0, f64::max);
    let c_late = scaled[16..].iter().copied().fold(0.0, f64::max);
    let pass = (fit.alpha + 1.0).abs() <= 0.05 && c_late <= c_early.max(1e-300) * 1.5;
    gate.check(
        1,
        "Couette boundary law",
        pass,
        format!("power {:.4}, C = max t^2|d - 1/(it)| = {c_early:.3} on [10,100], {c_late:.3} on [100,1000]", fit.alpha),
    );
}

fn constant_model(gate: &mut Gate) {
    let s = constant_model_suite(2026, 10_000);
    gate.check(
        2,
        "constant-coefficient model",
        s.max_rel_error <= 1e-8 && s.max_bound_ratio <= 1.0,
        format!("{} draws, max rel error {:.2e}, max log|m|/bound {:.4}", s.draws, s.max_rel_error, s.max_bound_ratio),
    );
}

fn log_blowup(gate: &mut Gate, r: &Runs) {
    let w = &r.general.wall;
    let mut pass = true;
    let mut parts = Vec::new();
    for (fit, pred, wall) in [(&w.dw_log_fits.0, w.dw_predicted_slopes.0, 0), (&w.dw_log_fits.1, w.dw_predicted_slopes.1, 1)] {
        match fit {
            Some(f) => {
                let rel = (f.alpha - pred).abs() / pred;
                pass &= f.r2 >= 0.99 && rel <= 0.2;
                parts.push(format!("wall {wall}: slope {:.4} vs {pred:.4} ({:.1}%), r2 {:.4}", f.alpha, 100.0 * rel, f.r2));
            }
            None => {
                pass = false;
                parts.push(format!("wall {wall}: no fit"));
            }
        }
    }
    gate.check(3, "log blow-up of the wall trace", pass, parts.join("; "));
}

fn critical_general(gate: &mut Gate, r: &Runs) {
    let (a, b) = (verdict(&r.general, 1.25), verdict(&r.general, 1.75));
    gate.check(
        4,
        "critical exponent 3/2",
        a == Some(Verdict::Bounded) && b == Some(Verdict::Growing),
        format!("s=1.25 {a:?}, s=1.75 {b:?}"),
    );
}

fn critical_zero(gate: &mut Gate, r: &Runs) {
    let w = &r.zero.wall;
    let limits_ok = w.dw_converged && w.dw_limits.is_some();
    let d2_ok = [&w.d2w_log_fits.0, &w.d2w_log_fits.1]
        .iter()
        .all(|f| f.as_ref().is_some_and(|f| f.alpha > 3.0 * f.alpha_stderr && f.r2 >= 0.99));
    let (a, b) = (verdict(&r.zero, 2.25), verdict(&r.zero, 2.75));
    let d2: Vec<String> = [&w.d2w_log_fits.0, &w.d2w_log_fits.1]
        .iter()
        .map(|f| f.as_ref().map_or("none".into(), |f| format!("{:.3} (r2 {:.4})", f.alpha, f.r2)))
        .collect();
    gate.check(
        5,
        "critical exponent 5/2",
        limits_ok && d2_ok && a == Some(Verdict::Bounded) && b == Some(Verdict::Growing),
        format!("dW limits {:?}, d2W log slopes {}, s=2.25 {a:?}, s=2.75 {b:?}", w.dw_limits, d2.join(" / ")),
    );
}

fn damping(gate: &mut Gate, r: &Runs) {
    let alpha = |f: &Option<channel_damping::diagnostics::RateFit>| f.as_ref().map_or(f64::NAN, |f| f.alpha);
    let v2_zero = alpha(&r.zero.velocity_v2_fit);
    let v2_general = alpha(&r.general.velocity_v2_fit);
    let full = [alpha(&r.zero.velocity_full_fit), alpha(&r.general.velocity_full_fit)];
    let pass = (v2_zero + 2.0).abs() <= 0.1 && v2_general <= -1.3 && full.iter().all(|a| (a + 1.0).abs() <= 0.1);
    gate.check(
        6,
        "damping rates",
        pass,
        format!(
            "v2 zero-Dirichlet {v2_zero:.4}, v2 general {v2_general:.4}, full {:.4} / {:.4}",
            full[0], full[1]
        ),
    );
}

fn scattering(gate: &mut Gate, r: &Runs) {
    let rate = r.general.scattering_fit.as_ref().map_or(f64::NAN, |f| f.alpha);
    gate.check(7, "scattering", rate <= -0.35, format!("rate {rate:.4}"));
}

fn formula(gate: &mut Gate, grid: &Grid) {
    let times = RunSpec::default().snapshot_times();
    let w = InitialData::Cosine.sample(grid);
    let flows = [ShearProfile::couette(), ShearProfile::quadratic(0.25).unwrap(), ShearProfile::tanh(2.0).unwrap()];
    let mut worst = (0.0f64, 0.0f64);
    let mut parts = Vec::new();
    for flow in &flows {
        let coeffs = build_coefficients(flow, grid.len()).unwrap();
        let rows = formula_check(1.0, &w, &coeffs, grid, &times).unwrap();
        let b = rows.iter().map(|r| r.boundary_rel).fold(0.0, f64::max);
        let e = rows.iter().map(|r| r.expansion_rel).fold(0.0, f64::max);
        worst = (worst.0.max(b), worst.1.max(e));
        parts.push(format!("{} {b:.1e}/{e:.1e}", flow.name()));
    }
    gate.check(
        8,
        "homogeneous-solution formula",
        worst.0 <= 1e-6 && worst.1 <= 1e-7,
        format!("boundary/expansion rel: {}", parts.join(", ")),
    );
}

fn asymptotics(gate: &mut Gate) {
    let sweep = SweepSpec::default();
    let mut exact = true;
    for &s in &sweep.s {
        for &t in &sweep.t {
            let v = cs_integral(1.0, 0.0, s, t).unwrap().value;
            let closed = if s == 0.0 { t.ln() } else { (t.powf(s) - 1.0) / s };
            exact &= v == Complex64::new(closed, 0.0);
        }
    }
    let rows = envelope_sweep(&sweep.s, &sweep.k, &sweep.y, &sweep.t).unwrap();
    let c = envelope_constant(&rows);
    let mut limit_err: f64 = 0.0;
    for j in 1..10 {
        let s = j as f64 / 10.0;
        let oracle = Complex64::from_polar(gamma(s), std::f64::consts::FRAC_PI_2 * s);
        limit_err = limit_err.max((cs_limit_constant(s).unwrap() - oracle).norm() / oracle.norm());
    }
    let mut flips = true;
    for s in [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8] {
        for p in 1..=6 {
            let p = p as f64;
            let convergent = lp_membership(s, p).unwrap().verdict == Membership::Convergent;
            flips &= convergent == (s * p < 1.0);
        }
    }
    gate.check(
        9,
        "asymptotics suite",
        exact && c <= 10.0 && limit_err <= 1e-6 && flips,
        format!(
            "C_s(T,0) exact {exact}, envelope constant {c:.3} over {} points, limit rel err {limit_err:.1e}, Lp flips at p = 1/s {flips}",
            rows.len()
        ),
    );
}

fn norms(gate: &mut Gate) {
    let s = norm_suites(50, 100).unwrap();
    let eq_bad: usize = s.equivalence.iter().map(|e| e.5).sum();
    let pass = s.parseval_max_rel <= 1e-8
        && s.monotone_in_s
        && eq_bad == 0
        && s.lipschitz_max_rel <= 1.0 + 1e-6
        && s.commutator_violations == 0;
    gate.check(
        10,
        "norm machinery",
        pass,
        format!(
            "Parseval {:.1e}, kernel/Fourier outside [min B_n, max B_n]: {eq_bad}/150, Lipschitz ratio/bound {:.4}, commutator estimate {:.3e}, held C = {:.3e}, {} violations",
            s.parseval_max_rel, s.lipschitz_max_rel, s.commutator_estimate, s.commutator_c, s.commutator_violations
        ),
    );
}

fn consistency(gate: &mut Gate, r: &Runs, grid: &Grid, coeffs: &CoefficientPair) {
    let c = consistency_from_runs(std::slice::from_ref(&r.zero_series), coeffs, grid, 16, T_END).unwrap();
    let alpha = c.fit.as_ref().map_or(f64::NAN, |f| f.alpha);
    gate.check(11, "consistency residual", alpha <= -1.2, format!("exponent {alpha:.4} for k = {:?}", c.wavenumbers));
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut gate = Gate { failures: 0 };
    let grid = grid();
    let coeffs = quadratic(grid.len());
    couette(&mut gate, &grid);
    constant_model(&mut gate);
    let runs = shared_runs(&grid, &coeffs);
    log_blowup(&mut gate, &runs);
    critical_general(&mut gate, &runs);
    critical_zero(&mut gate, &runs);
    damping(&mut gate, &runs);
    scattering(&mut gate, &runs);
    formula(&mut gate, &grid);
    asymptotics(&mut gate);
    norms(&mut gate);
    consistency(&mut gate, &runs, &grid, &coeffs);
    println!(
        "acceptance: {} of 11 criteria passed in {:.1} s",
        11 - gate.failures,
        start.elapsed().as_secs_f64()
    );
    if gate.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use channel_damping::evolve::{
    constant_model_exact, constant_model_simulate, run, step, ConstantModelParams, InitialData, ModeState, ModeSystem, RunSpec,
};
use channel_damping::grid::Grid;
use channel_damping::profiles::{build_coefficients, ShearProfile};
use num_complex::Complex64;
use proptest::prelude::*;

fn advance(sys: &ModeSystem, w: Vec<Complex64>, dt: f64, t_end: f64) -> Vec<Complex64> {
    let mut state = ModeState::new(w, sys.k());
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        state = step(&state, dt, sys).unwrap();
    }
    state.w
}

#[test]
fn rk4_is_fourth_order() {
    let grid = Grid::new(48, 6).unwrap();
    let coeffs = build_coefficients(&ShearProfile::quadratic(0.25).unwrap(), 48).unwrap();
    let sys = ModeSystem::new(1.0, &coeffs, &grid).unwrap();
    let w0 = InitialData::Cosine.sample(&grid);
    let sols: Vec<Vec<Complex64>> = [0.8, 0.4, 0.2].iter().map(|&dt| advance(&sys, w0.clone(), dt, 8.0)).collect();
    let diff = |a: &[Complex64], b: &[Complex64]| {
        let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        grid.l2_norm(&d)
    };
    let ratio = diff(&sols[0], &sols[1]) / diff(&sols[1], &sols[2]);
    assert!((13.0..19.0).contains(&ratio), "Richardson ratio {ratio}");
}

#[test]
fn run_respects_ceiling_and_schedule() {
    let grid = Grid::new(64, 7).unwrap();
    let coeffs = build_coefficients(&ShearProfile::tanh(2.0).unwrap(), 64).unwrap();
    let sys = ModeSystem::new(1.0, &coeffs, &grid).unwrap();
    let spec = RunSpec {
        t_end: 30.0,
        ..RunSpec::default()
    };
    let series = run(InitialData::Sin.sample(&grid), &sys, &spec).unwrap();
    assert!(series.ceiling_breach.is_none());
    assert_eq!(series.times(), spec.snapshot_times());
    // steps shorten to land on snapshot times
    assert!((60..60 + spec.snapshot_times().len() as u64).contains(&series.steps));
}

#[test]
fn zero_data_stays_zero() {
    let grid = Grid::new(32, 5).unwrap();
    let coeffs = build_coefficients(&ShearProfile::quadratic(0.25).unwrap(), 32).unwrap();
    let sys = ModeSystem::new(2.0, &coeffs, &grid).unwrap();
    let spec = RunSpec {
        t_end: 10.0,
        ..RunSpec::default()
    };
    let series = run(InitialData::Zero.sample(&grid), &sys, &spec).unwrap();
    assert!(series.snapshots.iter().all(|s| s.w.iter().all(|z| z.norm() == 0.0)));
}

#[test]
fn couette_vorticity_is_frozen() {
    let grid = Grid::new(64, 7).unwrap();
    let coeffs = build_coefficients(&ShearProfile::couette(), 64).unwrap();
    let sys = ModeSystem::new(1.0, &coeffs, &grid).unwrap();
    let w0 = InitialData::Cosine.sample(&grid);
    let w = advance(&sys, w0.clone(), 0.5, 20.0);
    assert!(w.iter().zip(&w0).all(|(a, b)| (a - b).norm() < 1e-14));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_model_matches_closed_form(
        re in -2.0..2.0f64, im in -2.0..2.0f64,
        d in 0.3..3.0f64, k in 0.5..2.0f64, eta in -10.0..10.0f64, t in 0.0..30.0f64,
    ) {
        let p = ConstantModelParams::new(Complex64::new(re, im), d, k, eta).unwrap();
        let exact = constant_model_exact(&p, t);
        let sim = constant_model_simulate(&p, t, 20_000);
        prop_assert!((sim - exact).norm() <= 1e-8 * exact.norm());
        prop_assert!(exact.norm().ln() <= p.log_bound() + 1e-12);
    }
}

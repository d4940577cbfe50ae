use channel_damping::elliptic::{solve_dirichlet, ModeOperator};
use channel_damping::grid::Grid;
use channel_damping::profiles::{build_coefficients, CoefficientPair, ShearProfile};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

const BETA: f64 = 0.25;

/// `g` and `dg/dz` for `U = y + βy²` in the normalized variable
/// `z = U / (1 + β)`, from the explicit inverse of `U`.
fn quadratic_g(z: f64) -> (f64, f64) {
    let lam = 1.0 + BETA;
    let y = (-1.0 + (1.0 + 4.0 * BETA * lam * z).sqrt()) / (2.0 * BETA);
    let g = 1.0 + 2.0 * BETA * y;
    (g, 2.0 * BETA * lam / g)
}

/// Data whose solution is `Φ = sin(πz) e^{-iktz}`.
fn manufactured(k: f64, t: f64, g: impl Fn(f64) -> (f64, f64), grid: &Grid) -> (Vec<Complex64>, Vec<Complex64>) {
    let phase = |z: f64| Complex64::from_polar(1.0, -k * t * z);
    let phi = grid.sample(|z| (PI * z).sin() * phase(z));
    let w = grid.sample(|z| {
        let (g, dg) = g(z);
        let (s, c) = (PI * z).sin_cos();
        let inner = -s + (g * g * (-PI * PI * s) + g * dg * PI * c) / (k * k);
        inner * phase(z)
    });
    (phi, w)
}

fn sup_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

fn setups() -> Vec<(CoefficientPair, Box<dyn Fn(f64) -> (f64, f64)>)> {
    vec![
        (build_coefficients(&ShearProfile::couette(), 128).unwrap(), Box::new(|_| (1.0, 0.0))),
        (build_coefficients(&ShearProfile::quadratic(BETA).unwrap(), 128).unwrap(), Box::new(quadratic_g)),
    ]
}

#[test]
fn manufactured_solution_to_1e8() {
    let grid = Grid::new(128, 8).unwrap();
    for (coeffs, g) in setups() {
        for k in [1.0, -0.5] {
            for t in [0.0, 1.0, 10.0, 50.0, 100.0] {
                let (phi, w) = manufactured(k, t, &g, &grid);
                let direct = solve_dirichlet(&w, k, t, &coeffs, &grid).unwrap();
                let err = sup_rel(&direct.phi, &phi);
                assert!(err <= 1e-8, "{} k={k} t={t}: {err:e}", coeffs.profile_name);
                let fast = ModeOperator::new(k, &coeffs, &grid).unwrap().solve_phi(&w, t);
                assert!(sup_rel(&fast, &phi) <= 1e-8);
            }
        }
    }
}

#[test]
fn coefficients_match_explicit_inverse() {
    let pair = build_coefficients(&ShearProfile::quadratic(BETA).unwrap(), 64).unwrap();
    for (i, &z) in pair.nodes.iter().enumerate() {
        let (g, dg) = quadratic_g(z);
        assert!((pair.g[i] - g).abs() < 1e-12);
        assert!((pair.dg[i] - dg).abs() < 1e-10);
    }
}

fn data(coeffs: &[(f64, f64)], grid: &Grid) -> Vec<Complex64> {
    grid.sample(|z| {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| Complex64::new(a, b) * (PI * j as f64 * z).cos())
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_is_linear(
        a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        lam in -2.0..2.0f64,
        t in 0.0..40.0f64,
    ) {
        let grid = Grid::new(64, 6).unwrap();
        let coeffs = build_coefficients(&ShearProfile::quadratic(BETA).unwrap(), 64).unwrap();
        let (wa, wb) = (data(&a, &grid), data(&b, &grid));
        let sum: Vec<Complex64> = wa.iter().zip(&wb).map(|(x, y)| x + lam * y).collect();
        let s = solve_dirichlet(&sum, 1.0, t, &coeffs, &grid).unwrap().phi;
        let pa = solve_dirichlet(&wa, 1.0, t, &coeffs, &grid).unwrap().phi;
        let pb = solve_dirichlet(&wb, 1.0, t, &coeffs, &grid).unwrap().phi;
        let combo: Vec<Complex64> = pa.iter().zip(&pb).map(|(x, y)| x + lam * y).collect();
        let scale = combo.iter().chain(&s).map(|z| z.norm()).fold(1e-300, f64::max);
        let gap = s.iter().zip(&combo).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-10 * scale);
    }

    #[test]
    fn conjugation_flips_wavenumber(
        a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        k in 0.3..3.0f64,
        t in 0.0..40.0f64,
    ) {
        let grid = Grid::new(64, 6).unwrap();
        let coeffs = build_coefficients(&ShearProfile::tanh(2.0).unwrap(), 64).unwrap();
        let w = data(&a, &grid);
        let wc: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
        let p = solve_dirichlet(&w, k, t, &coeffs, &grid).unwrap().phi;
        let q = solve_dirichlet(&wc, -k, t, &coeffs, &grid).unwrap().phi;
        let scale = p.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        let gap = p.iter().zip(&q).map(|(x, y)| (x.conj() - y).norm()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-10 * scale);
    }
}

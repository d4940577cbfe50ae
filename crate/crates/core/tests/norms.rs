use channel_damping::corpus;
use channel_damping::grid::{dft_coefficients, frequency, Grid};
use channel_damping::norms::{
    bn_constants, hs_interval, hs_torus, lipschitz_multiplier_check, torus_fourier_seminorm, torus_kernel_seminorm, traces,
    w1inf_norm, wsp_interval,
};
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

fn from_coefficients(coeffs: &[(i64, Complex64)], len: usize) -> Vec<Complex64> {
    corpus::periodic(len, |y| coeffs.iter().map(|(n, c)| c * Complex64::from_polar(1.0, 2.0 * PI * *n as f64 * y)).sum())
}

fn coefficient_strategy() -> impl Strategy<Value = Vec<(i64, Complex64)>> {
    prop::collection::vec((-10i64..=10, -1.0..1.0f64, -1.0..1.0f64), 1..8)
        .prop_map(|v| v.into_iter().map(|(n, a, b)| (n, Complex64::new(a, b))).collect())
}

/// Explicit-coefficient sum of `w(|n|)|c_n|²` with repeated frequencies merged.
fn direct_sum(coeffs: &[(i64, Complex64)], w: impl Fn(f64) -> f64) -> f64 {
    let mut merged = std::collections::BTreeMap::new();
    for (n, c) in coeffs {
        *merged.entry(*n).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
    merged.iter().map(|(n, c)| w(n.unsigned_abs() as f64) * c.norm_sqr()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(coeffs in coefficient_strategy()) {
        let u = from_coefficients(&coeffs, 64);
        let l2 = u.iter().map(|z| z.norm_sqr()).sum::<f64>() / 64.0;
        prop_assert!((hs_torus(&u, 0.0).unwrap() - l2).abs() <= 1e-8 * l2.max(1e-300));
    }

    #[test]
    fn torus_norm_matches_direct_sum_and_bounds(coeffs in coefficient_strategy(), s in 0.0..0.99f64) {
        let u = from_coefficients(&coeffs, 64);
        let v = hs_torus(&u, s).unwrap();
        let oracle = direct_sum(&coeffs, |n| if s == 0.0 { 1.0 } else { 1.0 + n.powf(2.0 * s) });
        prop_assert!((v - oracle).abs() <= 1e-10 * oracle.max(1e-300));
        let lower = direct_sum(&coeffs, |_| 1.0);
        let upper = direct_sum(&coeffs, |n| 1.0 + n * n);
        prop_assert!(v >= lower * (1.0 - 1e-12) && v <= upper * (1.0 + 1e-12));
    }

    #[test]
    fn torus_norm_monotone_in_s(coeffs in coefficient_strategy(), a in 0.0..0.99f64, b in 0.0..0.99f64) {
        let u = from_coefficients(&coeffs, 64);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(hs_torus(&u, lo).unwrap() <= hs_torus(&u, hi).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn lipschitz_multiplier_bound(seed in 0u64..1000, s in 0.05..0.45f64) {
        let u = corpus::band_limited(seed, 1, 128, 10).remove(0);
        let g = corpus::periodic(128, |y| Complex64::new(1.0 + 0.3 * (2.0 * PI * y).cos(), 0.0));
        let ratio = lipschitz_multiplier_check(&g, &u, s).unwrap();
        prop_assert!(ratio <= w1inf_norm(&g).unwrap() * (1.0 + 1e-6));
    }
}

#[test]
fn lipschitz_constant_multiplier_is_exact() {
    let u = corpus::band_limited(3, 1, 64, 6).remove(0);
    let g = vec![Complex64::new(2.0, 0.0); 64];
    assert!((lipschitz_multiplier_check(&g, &u, 0.3).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn lipschitz_single_mode_convolution() {
    // g = 1 + 0.1 sin(2πy), u = e^{2πi·3y}: gu has coefficients
    // 1 at n=3 and ∓0.05i at n=4, 2.
    let s = 0.3;
    let u = corpus::periodic(64, |y| Complex64::from_polar(1.0, 6.0 * PI * y));
    let g = corpus::periodic(64, |y| Complex64::new(1.0 + 0.1 * (2.0 * PI * y).sin(), 0.0));
    let w = |n: f64| 1.0 + n.powf(2.0 * s);
    let oracle = ((w(3.0) + 0.0025 * (w(4.0) + w(2.0))) / w(3.0)).sqrt();
    assert!((lipschitz_multiplier_check(&g, &u, s).unwrap() - oracle).abs() < 1e-12);
    assert!(oracle <= 1.1 * (1.0 + 0.2 * PI));
}

#[test]
fn bn_constants_approach_closed_form_limit() {
    for s in [0.1, 0.25, 0.4] {
        let table = bn_constants(s, 256).unwrap();
        assert!(table.values.iter().all(|&b| b > 0.0));
        let n = 256.0;
        // tail beyond |u| = n/2 with sin² replaced by its mean
        let tail = 2.0 * (n / 2.0f64).powf(-2.0 * s) / s;
        let limit = 2.0 * (2.0 * PI).powf(2.0 * s) * gamma(1.0 - 2.0 * s) * (PI * s).cos() / s;
        let b = table.values[255] + tail;
        assert!((b - limit).abs() <= 1e-3 * limit, "s={s}: {b} vs {limit}");
    }
}

#[test]
fn kernel_equals_bn_weighted_fourier_sum() {
    let s = 0.25;
    let table = bn_constants(s, 128).unwrap();
    for u in corpus::band_limited(5, 10, 256, 12) {
        let c = dft_coefficients(&u).unwrap();
        let weighted: f64 = c
            .iter()
            .enumerate()
            .filter_map(|(j, z)| {
                let n = frequency(j, 256).unsigned_abs() as usize;
                (n > 0).then(|| table.values[n - 1] * (n as f64).powf(2.0 * s) * z.norm_sqr())
            })
            .sum();
        let kernel = torus_kernel_seminorm(&u, s).unwrap();
        assert!((kernel - weighted).abs() <= 0.05 * weighted, "{kernel} vs {weighted}");
        let r = kernel / torus_fourier_seminorm(&u, s).unwrap();
        assert!(r >= table.min && r <= table.max);
    }
}

#[test]
fn interval_norms() {
    let grid = Grid::new(96, 8).unwrap();
    let u = grid.sample(|y| Complex64::new((3.0 * y).sin() + y * y, 0.0));
    for s in [0.2, 0.5, 0.8] {
        let a = hs_interval(&u, s, &grid).unwrap();
        let b = wsp_interval(&u, s, 2.0, &grid).unwrap();
        assert!((a - b).abs() <= 1e-8 * a);
    }
    assert!(hs_interval(&u, 0.97, &grid).is_err());
    // |y - 1/2| at s < 1/2 is stable under refinement
    let kink = |n: usize, m: u32| {
        let g = Grid::new(n, m).unwrap();
        hs_interval(&g.sample(|y| Complex64::new((y - 0.5).abs(), 0.0)), 0.3, &g).unwrap()
    };
    let (coarse, fine) = (kink(96, 9), kink(192, 10));
    assert!((coarse - fine).abs() <= 0.01 * fine, "{coarse} vs {fine}");
}

#[test]
fn traces_of_closed_forms() {
    let grid = Grid::new(48, 6).unwrap();
    let t = traces(&grid.sample(|y| Complex64::new((PI * y).sin(), 0.0)), &grid);
    for (got, want) in [(t.u0, 0.0), (t.u1, 0.0), (t.du0, PI), (t.du1, -PI), (t.d2u0, 0.0), (t.d2u1, 0.0)] {
        assert!((got - want).norm() < 1e-9, "{got} vs {want}");
    }
    let t = traces(&grid.sample(|y| Complex64::new(y.exp(), 0.0)), &grid);
    let e = std::f64::consts::E;
    for (got, want) in [(t.u0, 1.0), (t.u1, e), (t.du0, 1.0), (t.du1, e), (t.d2u0, 1.0), (t.d2u1, e)] {
        assert!((got - want).norm() < 1e-9, "{got} vs {want}");
    }
}

use channel_damping::asymptotics::{cs_integral, cs_limit_constant, envelope, lp_membership, Membership};
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn limit_constant_matches_gamma(s in 0.05..0.95f64) {
        let oracle = Complex64::from_polar(gamma(s), std::f64::consts::FRAC_PI_2 * s);
        prop_assert!((cs_limit_constant(s).unwrap() - oracle).norm() <= 1e-6 * oracle.norm());
    }

    #[test]
    fn lp_verdict_is_p_below_inverse_s(s in 0.1..0.9f64, p in 1.0..6.0f64) {
        prop_assume!((s * p - 1.0).abs() > 0.02);
        let m = lp_membership(s, p).unwrap();
        prop_assert_eq!(m.verdict == Membership::Convergent, s * p < 1.0);
        if let Some(sum) = m.sum {
            let exact = 1.0 / (1.0 - s * p);
            prop_assert!((sum - exact).abs() <= 1e-6 * exact);
        }
    }

    #[test]
    fn integral_below_envelope(s in 0.0..0.9f64, k in 0.5..4.0f64, ly in -6.0..0.0f64, lt in 1.0..6.0f64) {
        let (y, t) = (10f64.powf(ly), 10f64.powf(lt));
        let v = cs_integral(k, y, s, t).unwrap().value.norm();
        prop_assert!(v <= 10.0 * (envelope(s, k, y, t) + 1.0));
    }
}

#[test]
fn zero_height_is_closed_form() {
    for s in [0.0, 0.3, 0.5] {
        for t in [2.0, 10.0, 1e6] {
            let v = cs_integral(1.0, 0.0, s, t).unwrap().value;
            let want = if s == 0.0 { f64::ln(t) } else { (t.powf(s) - 1.0) / s };
            assert!((v - want).norm() <= 1e-14 * want.abs());
        }
    }
}

#[test]
fn matches_direct_quadrature_at_moderate_range() {
    // ∫₁^T t^{s-1} e^{ikty} dt by composite Simpson with many points per period
    let (k, y, s, t_up) = (1.0, 0.3, 0.4, 200.0);
    let n = 400_000;
    let h = (t_up - 1.0) / n as f64;
    let f = |t: f64| t.powf(s - 1.0) * Complex64::from_polar(1.0, k * t * y);
    let mut acc = f(1.0) + f(t_up);
    for j in 1..n {
        acc += f(1.0 + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    let simpson = acc * h / 3.0;
    let v = cs_integral(k, y, s, t_up).unwrap().value;
    assert!((v - simpson).norm() < 1e-9, "{v} vs {simpson}");
}

#[test]
fn rejects_out_of_range() {
    assert!(cs_integral(1.0, 0.1, 1.0, 10.0).is_err());
    assert!(cs_integral(0.0, 0.1, 0.5, 10.0).is_err());
    assert!(cs_limit_constant(0.0).is_err());
    assert!(lp_membership(0.5, 0.5).is_err());
}

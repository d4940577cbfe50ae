//! Oscillatory time integrals `∫₁^T t^{s−1} e^{ikty} dt`, their envelopes,
//! `L^p` membership of `y^{−s}` and the accumulated boundary-layer profile.

use crate::elliptic::HomogeneousPair;
use crate::evolve::RunSeries;
use crate::grid::Grid;
use crate::quadrature::{adaptive, FixedRule};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Start of the integrated-by-parts tail in `τ`.
const TAIL_START: f64 = 64.0;
const TAIL_TERMS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("time resolution too coarse: {per_period:.2} samples per oscillation period")]
    InsufficientTimeResolution { per_period: f64 },
    #[error("wall series ends at t = {have} before T = {want}")]
    SeriesTooShort { have: f64, want: f64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(&'static str),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OscIntegralResult {
    pub value: Complex64,
    #[serde(rename = "T")]
    pub t_upper: f64,
    pub k: f64,
    pub y: f64,
    pub s: f64,
    pub abs_error_estimate: f64,
}

/// `∫_A^B τ^{s−1} e^{iτ} dτ` for `1 ≤ A ≤ B` (`B` may be infinite).
fn tail(s: f64, a: f64, b: f64) -> (Complex64, f64) {
    let phi = |tau: f64| tau.powf(s - 1.0);
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mid = b.min(TAIL_START.max(a));
    if mid > a {
        let r = adaptive(|t| Complex64::from_polar(phi(t), t), a, mid, 1e-14, 1e-13, 2000);
        value += r.value;
        err += r.abs_error;
    }
    if b > mid {
        // ∫φ e^{iτ} = Σ_j i^j [−i φ^{(j)} e^{iτ}] + i^N ∫ φ^{(N)} e^{iτ}
        let mut coef = 1.0; // (s−1)(s−2)…(s−j)
        let mut ij = Complex64::new(1.0, 0.0);
        for j in 0..TAIL_TERMS {
            let at = |tau: f64| -I * coef * tau.powf(s - 1.0 - j as f64) * Complex64::from_polar(1.0, tau);
            let upper = if b.is_finite() { at(b) } else { Complex64::new(0.0, 0.0) };
            value += ij * (upper - at(mid));
            coef *= s - 1.0 - j as f64;
            ij *= I;
        }
        // |∫_mid^∞ φ^{(N)}| bound
        err += coef.abs() * mid.powf(s - TAIL_TERMS as f64) / (TAIL_TERMS as f64 - s);
    }
    (value, err)
}

/// `∫_a^b τ^{s−1} e^{iτ} dτ` for `0 < a ≤ b ≤ 1` through `τ = e^u`.
fn head(s: f64, a: f64, b: f64) -> (Complex64, f64) {
    let r = adaptive(
        |u| Complex64::from_polar((s * u).exp(), u.exp()),
        a.ln(),
        b.ln(),
        1e-14,
        1e-13,
        4000,
    );
    (r.value, r.abs_error)
}

/// `C_s(T, y) = ∫₁^T t^{s−1} e^{ikty} dt` for `s ∈ [0, 1)`.
pub fn cs_integral(k: f64, y: f64, s: f64, t_upper: f64) -> Result<OscIntegralResult, AsymptoticsError> {
    if !(k > 0.0) {
        return Err(AsymptoticsError::OutOfRange("k must be positive"));
    }
    if !(y >= 0.0) {
        return Err(AsymptoticsError::OutOfRange("y must be nonnegative"));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(AsymptoticsError::OutOfRange("s must lie in [0, 1)"));
    }
    if !(t_upper > 1.0) {
        return Err(AsymptoticsError::OutOfRange("T must exceed 1"));
    }
    let a = k * y;
    let (value, abs_error_estimate) = if a == 0.0 {
        let v = if s == 0.0 { t_upper.ln() } else { (t_upper.powf(s) - 1.0) / s };
        (Complex64::new(v, 0.0), 0.0)
    } else {
        let b = a * t_upper;
        let mut v = Complex64::new(0.0, 0.0);
        let mut e = 0.0;
        if a < 1.0 {
            let (hv, he) = head(s, a, b.min(1.0));
            v += hv;
            e += he;
        }
        if b > 1.0 {
            let (tv, te) = tail(s, a.max(1.0), b);
            v += tv;
            e += te;
        }
        let scale = a.powf(-s);
        (v * scale, e * scale)
    };
    Ok(OscIntegralResult {
        value,
        t_upper,
        k,
        y,
        s,
        abs_error_estimate,
    })
}

/// `∫₁^T e^{ikty} / t dt`.
pub fn oscillatory_log_integral(k: f64, y: f64, t_upper: f64) -> Result<OscIntegralResult, AsymptoticsError> {
    cs_integral(k, y, 0.0, t_upper)
}

/// `c(s) = ∫₀^∞ τ^{s−1} e^{iτ} dτ`, by quadrature on `(0, 64]` and an
/// integrated-by-parts tail.
pub fn cs_limit_constant(s: f64) -> Result<Complex64, AsymptoticsError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(AsymptoticsError::OutOfRange("s must lie in (0, 1)"));
    }
    // truncate where e^{su}/s drops below 1e-16
    let u_min = (1e-16 * s).ln() / s;
    let h = adaptive(|u| Complex64::from_polar((s * u).exp(), u.exp()), u_min, 0.0, 1e-15, 1e-14, 4000);
    let (t, _) = tail(s, 1.0, f64::INFINITY);
    Ok(h.value + t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Convergent,
    Divergent,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpMembership {
    pub s: f64,
    pub p: f64,
    pub verdict: Membership,
    /// `Σ_{i ≤ j} ∫_{2^{−i}}^{2^{−i+1}} y^{−sp} dy` for `j = 1..=40`.
    pub partial_sums: Vec<f64>,
    /// Limit of the partial sums with the geometric tail added, when convergent.
    pub sum: Option<f64>,
}

/// Dyadic test of `y^{−s} ∈ L^p(0, 1)`.
pub fn lp_membership(s: f64, p: f64) -> Result<LpMembership, AsymptoticsError> {
    if !(s > 0.0 && s < 1.0) || !(p >= 1.0) {
        return Err(AsymptoticsError::OutOfRange("need 0 < s < 1 and p ≥ 1"));
    }
    let rule = FixedRule::new(20);
    let e = s * p;
    let pieces: Vec<f64> = (1..=40)
        .map(|j| {
            let lo = 2f64.powi(-j);
            rule.integrate(lo, 2.0 * lo, |y| y.powf(-e))
        })
        .collect();
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = pieces
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let ratio = pieces[39] / pieces[38];
    let (verdict, sum) = if ratio < 1.0 - 1e-8 {
        (Membership::Convergent, Some(acc + pieces[39] * ratio / (1.0 - ratio)))
    } else {
        (Membership::Divergent, None)
    };
    Ok(LpMembership {
        s,
        p,
        verdict,
        partial_sums,
        sum,
    })
}

/// One point of the envelope sweep. For `s = 0` the envelope is
/// `max(0, min(log T, −log ky))`, otherwise `min(T^s, (ky)^{−s})`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeRow {
    pub s: f64,
    pub k: f64,
    pub y: f64,
    #[serde(rename = "T")]
    pub t_upper: f64,
    pub abs_value: f64,
    pub envelope: f64,
    /// `|C| / (envelope + 1)`.
    pub upper_ratio: f64,
    /// `envelope / |C|` where the envelope is at least 2, else `None`.
    pub lower_ratio: Option<f64>,
}

pub fn envelope(s: f64, k: f64, y: f64, t_upper: f64) -> f64 {
    let ky = k * y;
    if s == 0.0 {
        let inner = if ky > 0.0 { (-ky.ln()).min(t_upper.ln()) } else { t_upper.ln() };
        inner.max(0.0)
    } else if ky > 0.0 {
        t_upper.powf(s).min(ky.powf(-s))
    } else {
        t_upper.powf(s)
    }
}

/// Evaluates every combination of the given parameter lists.
pub fn envelope_sweep(
    s_list: &[f64],
    k_list: &[f64],
    y_list: &[f64],
    t_list: &[f64],
) -> Result<Vec<EnvelopeRow>, AsymptoticsError> {
    let mut rows = Vec::with_capacity(s_list.len() * k_list.len() * y_list.len() * t_list.len());
    for &s in s_list {
        for &k in k_list {
            for &y in y_list {
                for &t in t_list {
                    let r = cs_integral(k, y, s, t)?;
                    let abs_value = r.value.norm();
                    let env = envelope(s, k, y, t);
                    rows.push(EnvelopeRow {
                        s,
                        k,
                        y,
                        t_upper: t,
                        abs_value,
                        envelope: env,
                        upper_ratio: abs_value / (env + 1.0),
                        lower_ratio: (env >= 2.0).then(|| env / abs_value),
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Smallest constant for which every row satisfies both envelope bounds.
pub fn envelope_constant(rows: &[EnvelopeRow]) -> f64 {
    rows.iter()
        .map(|r| r.upper_ratio.max(r.lower_ratio.unwrap_or(0.0)))
        .fold(0.0, f64::max)
}

/// `∫_a^b (linear interpolant of h) e^{−iωt} dt`, exact.
fn filon_segment(ta: f64, tb: f64, ha: Complex64, hb: Complex64, omega: f64) -> Complex64 {
    let d = tb - ta;
    let x = omega * d;
    let ea = Complex64::from_polar(1.0, -omega * ta);
    if x.abs() < 1e-4 {
        // series of the weights for small phase change
        let w0 = d * (0.5 - I * x / 6.0 - x * x / 24.0);
        let w1 = d * (0.5 - I * x / 3.0 - x * x / 8.0);
        return ea * (ha * w0 + hb * w1);
    }
    let e = Complex64::from_polar(1.0, -x);
    let ix = I * x;
    // J0 = ∫₀¹ e^{−ixu} du, J1 = ∫₀¹ u e^{−ixu} du
    let j0 = (1.0 - e) / ix;
    let j1 = (j0 - e) / ix;
    ea * d * (ha * (j0 - j1) + hb * j1)
}

/// `∫₁^T H¹(t, y) dt` at the points `ys`, from the wall values of `H¹`
/// recorded by the run and the homogeneous pair.
pub fn boundary_layer_profile(
    series: &RunSeries,
    pair: &HomogeneousPair,
    grid: &Grid,
    t_upper: f64,
    ys: &[f64],
) -> Result<Vec<Complex64>, AsymptoticsError> {
    let wall = &series.wall;
    let have = wall.t.last().copied().unwrap_or(0.0);
    if have < t_upper * (1.0 - 1e-12) {
        return Err(AsymptoticsError::SeriesTooShort { have, want: t_upper });
    }
    let k = series.k;
    let max_dt = wall.t.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let max_y = ys.iter().map(|y| y.abs().max((y - 1.0).abs())).fold(0.0, f64::max);
    let per_period = 2.0 * std::f64::consts::PI / (k.abs() * max_y * max_dt).max(f64::MIN_POSITIVE);
    if per_period < 2.0 {
        return Err(AsymptoticsError::InsufficientTimeResolution { per_period });
    }
    let start = wall.t.partition_point(|&t| t < 1.0 - 1e-12);
    let end = wall.t.partition_point(|&t| t <= t_upper * (1.0 + 1e-12));
    let mut out = Vec::with_capacity(ys.len());
    for &y in ys {
        let u1 = grid.interpolate(&pair.u1, y);
        let u2 = grid.interpolate(&pair.u2, y);
        let mut a0 = Complex64::new(0.0, 0.0);
        let mut a1 = Complex64::new(0.0, 0.0);
        for i in start..end.saturating_sub(1) {
            let (ta, tb) = (wall.t[i], wall.t[i + 1]);
            a0 += filon_segment(ta, tb, wall.dphi[i].0, wall.dphi[i + 1].0, k * y);
            a1 += filon_segment(ta, tb, wall.dphi[i].1, wall.dphi[i + 1].1, k * (y - 1.0));
        }
        out.push(a0 * u1 + a1 * u2);
    }
    Ok(out)
}

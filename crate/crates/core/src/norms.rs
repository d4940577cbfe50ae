//! Fractional Sobolev norms on the torus (Fourier weights) and on `[0, 1]`
//! (Gagliardo double sums), `B_n` equivalence constants and wall traces.

use crate::grid::{dft_coefficients, frequency, Grid, GridError};
use crate::quadrature::FixedRule;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("exponent s = {s} outside {range}")]
    SOutOfRange { s: f64, range: &'static str },
    #[error("exponent p = {0} must be at least 1")]
    POutOfRange(f64),
    #[error("need at least 32 samples, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Squared torus norm `Σ (1 + |n|^{2s}) |û_n|²` of uniform periodic samples.
/// At `s = 0` the plain `L²` norm `Σ |û_n|²` is returned.
pub fn hs_torus(u: &[Complex64], s: f64) -> Result<f64, NormError> {
    if !(0.0..1.0).contains(&s) {
        return Err(NormError::SOutOfRange { s, range: "[0, 1)" });
    }
    let c = dft_coefficients(u)?;
    Ok(weighted_sum(&c, s))
}

fn weighted_sum(c: &[Complex64], s: f64) -> f64 {
    let len = c.len();
    c.iter()
        .enumerate()
        .map(|(j, z)| {
            let w = if s == 0.0 { 1.0 } else { 1.0 + (frequency(j, len).abs() as f64).powf(2.0 * s) };
            w * z.norm_sqr()
        })
        .sum()
}

/// Torus `H^s` inner product `Σ (1 + |n|^{2s}) conj(â_n) b̂_n`.
pub fn hs_torus_inner(a: &[Complex64], b: &[Complex64], s: f64) -> Result<Complex64, NormError> {
    if !(0.0..1.0).contains(&s) {
        return Err(NormError::SOutOfRange { s, range: "[0, 1)" });
    }
    let ca = dft_coefficients(a)?;
    let cb = dft_coefficients(b)?;
    let len = ca.len();
    Ok(ca
        .iter()
        .zip(&cb)
        .enumerate()
        .map(|(j, (x, y))| x.conj() * y * (1.0 + (frequency(j, len).abs() as f64).powf(2.0 * s)))
        .sum())
}

/// Fourier seminorm `Σ |n|^{2s} |û_n|²`.
pub fn torus_fourier_seminorm(u: &[Complex64], s: f64) -> Result<f64, NormError> {
    let c = dft_coefficients(u)?;
    let len = c.len();
    Ok(c
        .iter()
        .enumerate()
        .map(|(j, z)| (frequency(j, len).abs() as f64).powf(2.0 * s) * z.norm_sqr())
        .sum())
}

/// Spectral derivative of uniform periodic samples.
pub fn torus_derivative(u: &[Complex64]) -> Result<Vec<Complex64>, NormError> {
    let mut c = dft_coefficients(u)?;
    let len = c.len();
    for (j, z) in c.iter_mut().enumerate() {
        let n = frequency(j, len);
        *z *= if 2 * n.unsigned_abs() as usize == len {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, 2.0 * PI * n as f64)
        };
    }
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_inverse(len).process(&mut c);
    Ok(c)
}

/// Kernel form `∬_{𝕋²} |u(x) − u(y)|² / |x − y|^{1+2s}` on uniform periodic
/// samples, with the strip `|x − y| < 2Δ` replaced by the local-derivative
/// approximation.
pub fn torus_kernel_seminorm(u: &[Complex64], s: f64) -> Result<f64, NormError> {
    if !(s > 0.0 && s < 0.95) {
        return Err(NormError::SOutOfRange { s, range: "(0, 0.95)" });
    }
    let m = u.len();
    let du = torus_derivative(u)?;
    let dx = 1.0 / m as f64;
    let deriv: f64 = du.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
    let h = 2.0 * dx;
    let mut total = deriv * 2.0 * h.powf(2.0 * (1.0 - s)) / (2.0 * (1.0 - s));
    for d in 2..=m / 2 {
        let sd: f64 = (0..m).map(|i| (u[i] - u[(i + d) % m]).norm_sqr()).sum();
        let mut w = if d == 2 { 0.5 } else { 1.0 };
        // lags d and m - d coincide at the antipode
        if 2 * d != m {
            w *= 2.0;
        }
        let r = d as f64 * dx;
        total += w * sd * dx * dx / r.powf(1.0 + 2.0 * s);
    }
    Ok(total)
}

/// Pair-difference sums of closed uniform samples on `[0, 1]`, from which
/// Gagliardo seminorms for any `s` follow in linear time.
#[derive(Debug, Clone)]
pub struct GagliardoSums {
    dx: f64,
    p: f64,
    /// `Σ_i w_i w_{i+d} |u_i − u_{i+d}|^p` for `d = 0..=M`.
    lag_sums: Vec<f64>,
    /// Trapezoidal `∫ |u'|^p`.
    deriv: f64,
}

impl GagliardoSums {
    /// `u` and `du` hold `M + 1` samples at `j / M`.
    pub fn new(u: &[Complex64], du: &[Complex64], p: f64) -> Result<Self, NormError> {
        if !(p >= 1.0) {
            return Err(NormError::POutOfRange(p));
        }
        if u.len() < 32 {
            return Err(NormError::TooFewSamples(u.len()));
        }
        if du.len() != u.len() {
            return Err(GridError::LengthMismatch {
                expected: u.len(),
                got: du.len(),
            }
            .into());
        }
        let last = u.len() - 1;
        let dx = 1.0 / last as f64;
        let wt = |i: usize| if i == 0 || i == last { 0.5 } else { 1.0 };
        let pow = |x: f64| if p == 2.0 { x * x } else { x.powf(p) };
        let lag_sums = (0..=last)
            .map(|d| {
                (0..=last - d)
                    .map(|i| wt(i) * wt(i + d) * pow((u[i] - u[i + d]).norm()))
                    .sum()
            })
            .collect();
        let deriv = (0..=last).map(|i| wt(i) * pow(du[i].norm())).sum::<f64>() * dx;
        Ok(GagliardoSums { dx, p, lag_sums, deriv })
    }

    /// `∬ |u(x) − u(y)|^p / |x − y|^{1+sp}` over `[0, 1]²`.
    pub fn seminorm(&self, s: f64) -> Result<f64, NormError> {
        if !(s > 0.0 && s < 0.95) {
            return Err(NormError::SOutOfRange { s, range: "(0, 0.95)" });
        }
        let p = self.p;
        let dx = self.dx;
        let h = 2.0 * dx;
        let e = p * (1.0 - s);
        let mut total = self.deriv * 2.0 * h.powf(e) / e;
        for (d, &sd) in self.lag_sums.iter().enumerate().skip(2) {
            let w = if d == 2 { 0.5 } else { 1.0 };
            let r = d as f64 * dx;
            total += 2.0 * w * sd * dx * dx / r.powf(1.0 + s * p);
        }
        Ok(total)
    }
}

fn closed_samples(u: &[Complex64], grid: &Grid) -> (Vec<Complex64>, Vec<Complex64>) {
    let m = grid.uniform_len();
    let du = grid.diff(u);
    (grid.to_uniform_closed(u, m), grid.to_uniform_closed(&du, m))
}

/// Gagliardo seminorm squared `∬ |u(x) − u(y)|² / |x − y|^{1+2s}` of nodal
/// data, evaluated on `2^m + 1` uniform points.
pub fn hs_interval(u: &[Complex64], s: f64, grid: &Grid) -> Result<f64, NormError> {
    wsp_interval(u, s, 2.0, grid)
}

/// `W^{s,p}` Gagliardo seminorm to the power `p`.
pub fn wsp_interval(u: &[Complex64], s: f64, p: f64, grid: &Grid) -> Result<f64, NormError> {
    if grid.len() < 32 {
        return Err(NormError::TooFewSamples(grid.len()));
    }
    if !(s > 0.0 && s < 0.95) {
        return Err(NormError::SOutOfRange { s, range: "(0, 0.95)" });
    }
    let (us, dus) = closed_samples(u, grid);
    GagliardoSums::new(&us, &dus, p)?.seminorm(s)
}

/// Recursive interval norms `‖u‖²_{H^s} = ‖u‖²_{H^{s−1}} + ‖∂u‖²_{H^{s−1}}`
/// with base `‖u‖²_{L²} + [u]²_σ` for `0 < σ < 1`.
#[derive(Debug, Clone)]
pub struct SobolevLadder {
    /// Per derivative order `j`: `(‖∂^j u‖²_{L²}, sums for ∂^j u)`.
    levels: Vec<(f64, GagliardoSums)>,
}

impl SobolevLadder {
    /// Prepares norms up to (but excluding) `max_order + 1`.
    pub fn new(u: &[Complex64], grid: &Grid, max_order: usize) -> Result<Self, NormError> {
        let m = grid.uniform_len();
        let mut levels = Vec::with_capacity(max_order + 1);
        let mut cur = u.to_vec();
        for _ in 0..=max_order {
            let next = grid.diff(&cur);
            let l2 = grid.l2_norm(&cur).powi(2);
            let sums = GagliardoSums::new(&grid.to_uniform_closed(&cur, m), &grid.to_uniform_closed(&next, m), 2.0)?;
            levels.push((l2, sums));
            cur = next;
        }
        Ok(SobolevLadder { levels })
    }

    /// `‖u‖²_{H^s}` for `0 ≤ s < max_order + 0.95`.
    pub fn norm_sq(&self, s: f64) -> Result<f64, NormError> {
        if !(s >= 0.0) {
            return Err(NormError::SOutOfRange { s, range: "[0, max order)" });
        }
        self.norm_sq_from(0, s)
    }

    fn norm_sq_from(&self, level: usize, s: f64) -> Result<f64, NormError> {
        let order = s.floor() as usize;
        let sigma = s - order as f64;
        if level + order >= self.levels.len() {
            return Err(NormError::SOutOfRange {
                s,
                range: "below the prepared derivative order",
            });
        }
        if order == 0 {
            let (l2, sums) = &self.levels[level];
            return Ok(if sigma < 1e-12 { *l2 } else { l2 + sums.seminorm(sigma)? });
        }
        Ok(self.norm_sq_from(level, s - 1.0)? + self.norm_sq_from(level + 1, s - 1.0)?)
    }
}

/// `B_n = |n|^{-2s} ∫_{−1/2}^{1/2} 4 sin²(πnx) / |x|^{1+2s} dx` for
/// `n = 1..=n_max`, so that the torus kernel integral equals
/// `Σ B_n |n|^{2s} |û_n|²`.
#[derive(Debug, Clone, Serialize)]
pub struct BnTable {
    pub s: f64,
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn bn_constants(s: f64, n_max: usize) -> Result<BnTable, NormError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(NormError::SOutOfRange { s, range: "(0, 1)" });
    }
    let rule = FixedRule::new(24);
    let values: Vec<f64> = (1..=n_max.max(1))
        .map(|n| {
            let nf = n as f64;
            let f = |x: f64| {
                let v = (PI * nf * x).sin();
                4.0 * v * v / x.powf(1.0 + 2.0 * s)
            };
            let half = 0.5 / nf;
            // geometric grading towards the origin inside the first half period
            let mut total = 0.0;
            let mut hi = half;
            for _ in 0..60 {
                let lo = 0.5 * hi;
                total += rule.integrate(lo, hi, f);
                hi = lo;
            }
            for j in 1..n {
                total += rule.integrate(j as f64 * half, (j + 1) as f64 * half, f);
            }
            2.0 * total / nf.powf(2.0 * s)
        })
        .collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(0.0, f64::max);
    Ok(BnTable { s, values, min, max })
}

/// Wall values and wall derivatives up to second order.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Traces {
    pub u0: Complex64,
    pub u1: Complex64,
    pub du0: Complex64,
    pub du1: Complex64,
    pub d2u0: Complex64,
    pub d2u1: Complex64,
}

pub fn traces(u: &[Complex64], grid: &Grid) -> Traces {
    let n = u.len();
    let (du0, du1) = grid.wall_derivatives(u);
    let (d2u0, d2u1) = grid.wall_second_derivatives(u);
    Traces {
        u0: u[0],
        u1: u[n - 1],
        du0,
        du1,
        d2u0,
        d2u1,
    }
}

/// `‖g‖_{W^{1,∞}} = max|g| + max|g'|` for periodic uniform samples.
pub fn w1inf_norm(g: &[Complex64]) -> Result<f64, NormError> {
    let dg = torus_derivative(g)?;
    let m0 = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let m1 = dg.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(m0 + m1)
}

/// `‖gu‖_{H^s(𝕋)} / ‖u‖_{H^s(𝕋)}` for periodic uniform samples.
pub fn lipschitz_multiplier_check(g: &[Complex64], u: &[Complex64], s: f64) -> Result<f64, NormError> {
    let gu: Vec<Complex64> = g.iter().zip(u).map(|(a, b)| a * b).collect();
    Ok((hs_torus(&gu, s)? / hs_torus(u, s)?).sqrt())
}

/// The constant `C` implied by
/// `Re⟨u, g²u⟩_{H^s} ≥ min(g²) ‖u‖²_{H^s} − C ‖g²‖_{Lip} ‖u‖²_{L²}`
/// for one sample; `g2` must be real and positive.
pub fn commutator_constant(g2: &[Complex64], u: &[Complex64], s: f64) -> Result<f64, NormError> {
    let g2u: Vec<Complex64> = g2.iter().zip(u).map(|(a, b)| a * b).collect();
    let lhs = hs_torus_inner(u, &g2u, s)?.re;
    let min_g2 = g2.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let lip = torus_derivative(g2)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let l2 = hs_torus(u, 0.0)?;
    let deficit = min_g2 * hs_torus(u, s)? - lhs;
    Ok(if lip == 0.0 { 0.0 } else { deficit / (lip * l2) })
}

/// Norms of one snapshot.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub t: f64,
    pub l2: f64,
    /// `(s, Σ(1 + |n|^{2s})|û_n|²)` on the resampled torus.
    pub hs_torus: Vec<(f64, f64)>,
    /// `(s, ‖u‖_{H^s([0,1])})` from the recursive ladder.
    pub hs_interval: Vec<(f64, f64)>,
    /// `((s, p), W^{s,p} seminorm^p)`.
    pub wsp: Vec<((f64, f64), f64)>,
    pub traces: Traces,
}

/// Which norms to evaluate per snapshot.
#[derive(Debug, Clone, Default, Serialize)]
pub struct NormPlan {
    pub torus_s: Vec<f64>,
    pub interval_s: Vec<f64>,
    pub wsp: Vec<(f64, f64)>,
}

pub fn norm_report(t: f64, u: &[Complex64], grid: &Grid, plan: &NormPlan) -> Result<NormReport, NormError> {
    let max_s = plan.interval_s.iter().copied().fold(0.0, f64::max);
    let hs_interval = if plan.interval_s.is_empty() {
        Vec::new()
    } else {
        let ladder = SobolevLadder::new(u, grid, max_s.floor() as usize)?;
        plan.interval_s
            .iter()
            .map(|&s| ladder.norm_sq(s).map(|v| (s, v.sqrt())))
            .collect::<Result<_, _>>()?
    };
    let hs_torus = if plan.torus_s.is_empty() {
        Vec::new()
    } else {
        let c = dft_coefficients(&grid.to_uniform(u))?;
        plan.torus_s.iter().map(|&s| (s, weighted_sum(&c, s))).collect()
    };
    let wsp = plan
        .wsp
        .iter()
        .map(|&(s, p)| wsp_interval(u, s, p, grid).map(|v| ((s, p), v)))
        .collect::<Result<_, _>>()?;
    Ok(NormReport {
        t,
        l2: grid.l2_norm(u),
        hs_torus,
        hs_interval,
        wsp,
        traces: traces(u, grid),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(m: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..m).map(|j| f(j as f64 / m as f64)).collect()
    }

    #[test]
    fn torus_single_mode() {
        let u = uniform(64, |y| Complex64::from_polar(1.0, 2.0 * PI * y));
        assert!((hs_torus(&u, 0.5).unwrap() - 2.0).abs() < 1e-9);
        assert!((hs_torus(&u, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let c = uniform(64, |_| Complex64::new(3.0, 0.0));
        assert!((hs_torus(&c, 0.7).unwrap() - 9.0).abs() < 1e-12);
        assert!(hs_torus(&c, 1.0).is_err());
    }

    #[test]
    fn gagliardo_constant_is_zero_and_p2_matches() {
        let grid = Grid::new(48, 8).unwrap();
        let one = vec![Complex64::new(1.0, 0.0); 48];
        assert!(hs_interval(&one, 0.3, &grid).unwrap() < 1e-20);
        let u = grid.sample(|y| Complex64::new((3.0 * y).sin(), y * y));
        let a = hs_interval(&u, 0.4, &grid).unwrap();
        let b = wsp_interval(&u, 0.4, 2.0, &grid).unwrap();
        assert!((a - b).abs() <= 1e-8 * a);
        assert!(hs_interval(&u, 0.95, &grid).is_err());
    }

    #[test]
    fn gagliardo_of_linear_function() {
        // u = y: ∬ |x−y|^{1−2s} = 2 / ((2−2s)(3−2s))
        let s: f64 = 0.3;
        let exact = 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
        let m = 1024;
        let u: Vec<Complex64> = (0..=m).map(|j| Complex64::new(j as f64 / m as f64, 0.0)).collect();
        let du = vec![Complex64::new(1.0, 0.0); m + 1];
        let v = GagliardoSums::new(&u, &du, 2.0).unwrap().seminorm(s).unwrap();
        assert!((v - exact).abs() < 1e-3 * exact, "{v} vs {exact}");
    }

    #[test]
    fn ladder_integer_orders() {
        let grid = Grid::new(40, 9).unwrap();
        let u = grid.sample(|y| Complex64::new((PI * y).sin(), 0.0));
        let ladder = SobolevLadder::new(&u, &grid, 2).unwrap();
        // ‖sin πy‖² = 1/2, ‖π cos πy‖² = π²/2, ‖π² sin πy‖² = π⁴/2
        assert!((ladder.norm_sq(0.0).unwrap() - 0.5).abs() < 1e-10);
        assert!((ladder.norm_sq(1.0).unwrap() - 0.5 * (1.0 + PI * PI)).abs() < 1e-9);
        let h2 = 0.5 * (1.0 + 2.0 * PI * PI + PI.powi(4));
        assert!((ladder.norm_sq(2.0).unwrap() - h2).abs() < 1e-7);
        assert!(ladder.norm_sq(3.0).is_err());
    }

    #[test]
    fn traces_of_sine_and_exponential() {
        let grid = Grid::new(40, 6).unwrap();
        let t = traces(&grid.sample(|y| Complex64::new((PI * y).sin(), 0.0)), &grid);
        assert!(t.u0.norm() < 1e-9 && t.u1.norm() < 1e-9);
        assert!((t.du0.re - PI).abs() < 1e-9 && (t.du1.re + PI).abs() < 1e-9);
        assert!(t.d2u0.norm() < 1e-7 && t.d2u1.norm() < 1e-7);
        let e = std::f64::consts::E;
        let t = traces(&grid.sample(|y| Complex64::new(y.exp(), 0.0)), &grid);
        for (v, x) in [(t.u0, 1.0), (t.u1, e), (t.du0, 1.0), (t.du1, e), (t.d2u0, 1.0), (t.d2u1, e)] {
            assert!((v.re - x).abs() < 1e-9);
        }
    }

    #[test]
    fn bn_positive_and_bounded() {
        let t = bn_constants(0.25, 64).unwrap();
        assert!(t.values.iter().all(|&b| b > 0.0));
        assert!(t.max / t.min <= 10.0);
    }

    #[test]
    fn multiplier_by_constant() {
        let g = uniform(64, |_| Complex64::new(2.0, 0.0));
        let u = uniform(64, |y| Complex64::new((2.0 * PI * y).cos(), (6.0 * PI * y).sin()));
        assert!((lipschitz_multiplier_check(&g, &u, 0.3).unwrap() - 2.0).abs() < 1e-12);
    }
}

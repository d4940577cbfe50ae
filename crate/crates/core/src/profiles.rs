//! Monotone shear profiles `U` and the normalized coefficient functions
//! `f(z) = U''(U⁻¹(z))`, `g(z) = U'(U⁻¹(z))` on `[0, 1]`.

use crate::grid::{Grid, GridError};
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("profile is not monotone: U'({y}) = {du} violates {c} < U' < {inv}", inv = 1.0 / c)]
    NonMonotone { y: f64, du: f64, c: f64 },
    #[error("inversion of U failed to converge at z = {0}")]
    InversionFailure(f64),
    #[error("need at least 16 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid domain [{0}, {1}]")]
    InvalidDomain(f64, f64),
    #[error("unknown profile `{0}`")]
    UnknownProfile(String),
    #[error("tabulated profile: {0}")]
    Table(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Background velocity `U` on `[a, b]` with its first two derivatives.
#[derive(Clone)]
pub struct ShearProfile {
    name: String,
    u: ScalarFn,
    du: ScalarFn,
    d2u: ScalarFn,
    domain: (f64, f64),
    c: f64,
}

impl fmt::Debug for ShearProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShearProfile")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("c", &self.c)
            .finish()
    }
}

const VALIDATION_SAMPLES: usize = 4001;

impl ShearProfile {
    /// Builds a profile from `U` and optional analytic derivatives. Missing
    /// derivatives are replaced by fourth-order central differences.
    ///
    /// When `c` is `None` the monotonicity bound is chosen as 0.9 of the
    /// tightest admissible value.
    pub fn new(
        name: impl Into<String>,
        u: ScalarFn,
        du: Option<ScalarFn>,
        d2u: Option<ScalarFn>,
        domain: (f64, f64),
        c: Option<f64>,
    ) -> Result<Self, ProfileError> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(ProfileError::InvalidDomain(a, b));
        }
        let h1 = 1e-3 * (b - a);
        let du = du.unwrap_or_else(|| central_first(u.clone(), h1));
        let d2u = d2u.unwrap_or_else(|| central_second(u.clone(), 1e-2 * (b - a)));
        let samples: Vec<(f64, f64)> = (0..VALIDATION_SAMPLES)
            .map(|i| {
                let y = a + (b - a) * i as f64 / (VALIDATION_SAMPLES - 1) as f64;
                (y, du(y))
            })
            .collect();
        let c = match c {
            Some(c) => c,
            None => {
                let (ymin, dmin) = samples
                    .iter()
                    .copied()
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("non-empty");
                if dmin <= 0.0 {
                    return Err(ProfileError::NonMonotone { y: ymin, du: dmin, c: 0.0 });
                }
                let dmax = samples.iter().map(|s| s.1).fold(f64::MIN, f64::max);
                0.9 * dmin.min(1.0 / dmax)
            }
        };
        if let Some(&(y, d)) = samples.iter().find(|(_, d)| !(c < *d && *d < 1.0 / c)) {
            return Err(ProfileError::NonMonotone { y, du: d, c });
        }
        Ok(ShearProfile {
            name: name.into(),
            u,
            du,
            d2u,
            domain,
            c,
        })
    }

    /// Couette flow `U(y) = y` on `[0, 1]`.
    pub fn couette() -> Self {
        Self::new(
            "couette",
            Arc::new(|y| y),
            Some(Arc::new(|_| 1.0)),
            Some(Arc::new(|_| 0.0)),
            (0.0, 1.0),
            None,
        )
        .expect("couette is monotone")
    }

    /// `U(y) = y + beta y²` on `[0, 1]`; `beta = 1/4` is the standard
    /// quadratic test flow.
    pub fn quadratic(beta: f64) -> Result<Self, ProfileError> {
        Self::new(
            "quadratic",
            Arc::new(move |y| y + beta * y * y),
            Some(Arc::new(move |y| 1.0 + 2.0 * beta * y)),
            Some(Arc::new(move |_| 2.0 * beta)),
            (0.0, 1.0),
            None,
        )
    }

    /// `U(y) = tanh(gamma (y - 1/2)) / gamma` on `[0, 1]`.
    pub fn tanh(gamma: f64) -> Result<Self, ProfileError> {
        Self::new(
            "tanh",
            Arc::new(move |y| (gamma * (y - 0.5)).tanh() / gamma),
            Some(Arc::new(move |y| {
                let c = (gamma * (y - 0.5)).cosh();
                1.0 / (c * c)
            })),
            Some(Arc::new(move |y| {
                let x = gamma * (y - 0.5);
                let c = x.cosh();
                -2.0 * gamma * x.tanh() / (c * c)
            })),
            (0.0, 1.0),
            None,
        )
    }

    /// Looks up a named profile. `param` is `beta` for "quadratic" and
    /// `gamma` for "tanh"; Couette ignores it.
    pub fn named(name: &str, param: Option<f64>) -> Result<Self, ProfileError> {
        match name {
            "couette" => Ok(Self::couette()),
            "quadratic" => Self::quadratic(param.unwrap_or(0.25)),
            "tanh" => Self::tanh(param.unwrap_or(1.0)),
            other => Err(ProfileError::UnknownProfile(other.to_string())),
        }
    }

    /// Profile from tabulated `(y, U)` pairs, interpolated with a
    /// Floater–Hormann rational interpolant of blending degree 3.
    pub fn from_table(ys: Vec<f64>, us: Vec<f64>) -> Result<Self, ProfileError> {
        if ys.len() != us.len() || ys.len() < 5 {
            return Err(ProfileError::Table("need at least 5 matching (y, U) pairs".into()));
        }
        if !ys.windows(2).all(|w| w[1] > w[0]) {
            return Err(ProfileError::Table("y values must be strictly increasing".into()));
        }
        let domain = (ys[0], ys[ys.len() - 1]);
        let interp = FloaterHormann::new(ys, us, 3);
        Self::new("table", Arc::new(move |y| interp.eval(y)), None, None, domain, None)
    }

    /// Reads `y,U` rows (an optional non-numeric header is skipped).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self, ProfileError> {
        let text = std::fs::read_to_string(path)?;
        let mut ys = Vec::new();
        let mut us = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let (Some(y), Some(u)) = (parts.next(), parts.next()) else {
                return Err(ProfileError::Table(format!("line {}: expected `y,U`", lineno + 1)));
            };
            match (y.parse::<f64>(), u.parse::<f64>()) {
                (Ok(y), Ok(u)) => {
                    ys.push(y);
                    us.push(u);
                }
                _ if lineno == 0 => continue,
                _ => return Err(ProfileError::Table(format!("line {}: not numeric", lineno + 1))),
            }
        }
        Self::from_table(ys, us)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn monotonicity_bound(&self) -> f64 {
        self.c
    }

    pub fn u(&self, y: f64) -> f64 {
        (self.u)(y)
    }

    pub fn du(&self, y: f64) -> f64 {
        (self.du)(y)
    }

    pub fn d2u(&self, y: f64) -> f64 {
        (self.d2u)(y)
    }

    /// Solves `U(y) = target` on the domain by Newton steps safeguarded with
    /// bisection.
    pub fn invert(&self, target: f64) -> Result<f64, ProfileError> {
        let (mut lo, mut hi) = self.domain;
        let (ulo, uhi) = (self.u(lo), self.u(hi));
        if target <= ulo {
            return Ok(lo);
        }
        if target >= uhi {
            return Ok(hi);
        }
        let mut y = lo + (hi - lo) * (target - ulo) / (uhi - ulo);
        let scale = (hi - lo).abs().max(1.0);
        for _ in 0..200 {
            let r = self.u(y) - target;
            if r == 0.0 {
                return Ok(y);
            }
            if r < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let mut next = y - r / self.du(y);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= 1e-12 * scale * 1e-3 || hi - lo <= 1e-15 * scale {
                return Ok(next);
            }
            y = next;
        }
        Err(ProfileError::InversionFailure(target))
    }
}

fn central_first(u: ScalarFn, h: f64) -> ScalarFn {
    Arc::new(move |y| (-u(y + 2.0 * h) + 8.0 * u(y + h) - 8.0 * u(y - h) + u(y - 2.0 * h)) / (12.0 * h))
}

fn central_second(u: ScalarFn, h: f64) -> ScalarFn {
    Arc::new(move |y| {
        (-u(y + 2.0 * h) + 16.0 * u(y + h) - 30.0 * u(y) + 16.0 * u(y - h) - u(y - 2.0 * h)) / (12.0 * h * h)
    })
}

/// Floater–Hormann barycentric rational interpolant.
struct FloaterHormann {
    xs: Vec<f64>,
    ys: Vec<f64>,
    w: Vec<f64>,
}

impl FloaterHormann {
    fn new(xs: Vec<f64>, ys: Vec<f64>, d: usize) -> Self {
        let n = xs.len() - 1;
        let d = d.min(n);
        let mut w = vec![0.0; n + 1];
        for (k, wk) in w.iter_mut().enumerate() {
            let imin = k.saturating_sub(d);
            let imax = k.min(n - d);
            let mut sum = 0.0;
            for i in imin..=imax {
                let mut prod = 1.0;
                for j in i..=i + d {
                    if j != k {
                        prod /= (xs[k] - xs[j]).abs();
                    }
                }
                sum += prod;
            }
            *wk = if (k as isize - d as isize) % 2 == 0 { sum } else { -sum };
        }
        FloaterHormann { xs, ys, w }
    }

    fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xk, &yk), &wk) in self.xs.iter().zip(&self.ys).zip(&self.w) {
            let diff = x - xk;
            if diff == 0.0 {
                return yk;
            }
            let c = wk / diff;
            num += c * yk;
            den += c;
        }
        num / den
    }
}

/// `f`, `g` and their first two derivatives sampled on the Chebyshev nodes
/// of `[0, 1]`.
#[derive(Debug, Clone)]
pub struct CoefficientPair {
    pub nodes: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub df: Vec<f64>,
    pub d2f: Vec<f64>,
    pub dg: Vec<f64>,
    pub d2g: Vec<f64>,
    /// `U(a)`, the Galilean shift removed by the normalization.
    pub shift: f64,
    /// `U(b) - U(a)`, the length of the velocity range mapped onto `[0, 1]`.
    pub scale: f64,
    pub profile_name: String,
}

impl CoefficientPair {
    pub fn n_samples(&self) -> usize {
        self.nodes.len()
    }

    pub fn max_abs_f(&self) -> f64 {
        self.f.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_abs_g(&self) -> f64 {
        self.g.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// Constant coefficients `f ≡ fc`, `g ≡ gc` on the given node count.
    pub fn constant(fc: f64, gc: f64, n: usize) -> Result<Self, ProfileError> {
        let grid = grid_for(n)?;
        let len = grid.len();
        Ok(CoefficientPair {
            nodes: grid.nodes().to_vec(),
            f: vec![fc; len],
            g: vec![gc; len],
            df: vec![0.0; len],
            d2f: vec![0.0; len],
            dg: vec![0.0; len],
            d2g: vec![0.0; len],
            shift: 0.0,
            scale: 1.0,
            profile_name: "constant".into(),
        })
    }
}

fn grid_for(n: usize) -> Result<Grid, ProfileError> {
    if n < 16 {
        return Err(ProfileError::TooFewSamples(n));
    }
    let m = (n as f64).log2().ceil() as u32;
    Ok(Grid::new(n, m)?)
}

/// Samples `f` and `g` on `n` Chebyshev nodes of the normalized interval.
///
/// The velocity range `[U(a), U(b)]` is mapped affinely onto `[0, 1]`; the
/// values of `f` and `g` are not rescaled.
pub fn build_coefficients(profile: &ShearProfile, n: usize) -> Result<CoefficientPair, ProfileError> {
    let grid = grid_for(n)?;
    let (a, b) = profile.domain();
    let shift = profile.u(a);
    let scale = profile.u(b) - shift;
    let h3 = 1e-3 * (b - a);
    let h4 = 1e-2 * (b - a);
    let d2u = profile.d2u.clone();
    let third = central_first(d2u.clone(), h3);
    let fourth = central_second(d2u, h4);

    let len = grid.len();
    let mut out = CoefficientPair {
        nodes: grid.nodes().to_vec(),
        f: Vec::with_capacity(len),
        g: Vec::with_capacity(len),
        df: Vec::with_capacity(len),
        d2f: Vec::with_capacity(len),
        dg: Vec::with_capacity(len),
        d2g: Vec::with_capacity(len),
        shift,
        scale,
        profile_name: profile.name().to_string(),
    };
    for &z in grid.nodes() {
        let y = profile.invert(shift + scale * z)?;
        let u1 = profile.du(y);
        let u2 = profile.d2u(y);
        let u3 = third(y);
        let u4 = fourth(y);
        // d/dz = (scale / U') d/dy
        let dzdy = scale / u1;
        out.f.push(u2);
        out.g.push(u1);
        out.dg.push(u2 * dzdy);
        out.df.push(u3 * dzdy);
        out.d2g.push(scale * dzdy * (u3 / u1 - u2 * u2 / (u1 * u1)));
        out.d2f.push(scale * dzdy * (u4 / u1 - u3 * u2 / (u1 * u1)));
    }
    Ok(out)
}

/// Derivative bounds and periodic-extension jumps of a coefficient pair.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub order: usize,
    /// `max |f^(j)|` for `j = 0..=order`.
    pub f_bounds: Vec<f64>,
    /// `max |g^(j)|` for `j = 0..=order`.
    pub g_bounds: Vec<f64>,
    /// `|g²(1) - g²(0)|`.
    pub g2_jump: f64,
    /// `|f(1) - f(0)|`.
    pub f_jump: f64,
    /// Human-readable flags for non-periodic extensions.
    pub flags: Vec<String>,
}

/// Reports derivative bounds up to `order` (clamped to 1..=3) and the jumps
/// of the periodic extensions of `f` and `g²`.
pub fn validate_regularity(pair: &CoefficientPair, order: usize) -> RegularityReport {
    let order = order.clamp(1, 3);
    let n = pair.n_samples();
    let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut f_bounds = vec![maxabs(&pair.f), maxabs(&pair.df), maxabs(&pair.d2f)];
    let mut g_bounds = vec![maxabs(&pair.g), maxabs(&pair.dg), maxabs(&pair.d2g)];
    if order == 3 {
        let grid = grid_for(n).expect("pair was built on a valid grid");
        f_bounds.push(maxabs(&grid.diff_real(&pair.d2f)));
        g_bounds.push(maxabs(&grid.diff_real(&pair.d2g)));
    }
    f_bounds.truncate(order + 1);
    g_bounds.truncate(order + 1);
    let g2_jump = (pair.g[n - 1].powi(2) - pair.g[0].powi(2)).abs();
    let f_jump = (pair.f[n - 1] - pair.f[0]).abs();
    // interpolated tables carry finite-difference noise in f
    let tol = 1e-6 * (1.0 + pair.max_abs_f().max(pair.g.iter().fold(0.0, |m, g| m.max(g * g))));
    let mut flags = Vec::new();
    if g2_jump > tol {
        let ming2 = pair.min_abs_g().powi(2);
        flags.push(format!(
            "periodic extension of g² jumps by {g2_jump:.6} (min g² = {ming2:.6})"
        ));
    }
    if f_jump > tol {
        flags.push(format!("periodic extension of f jumps by {f_jump:.6}"));
    }
    RegularityReport {
        order,
        f_bounds,
        g_bounds,
        g2_jump,
        f_jump,
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn couette_is_identity() {
        let pair = build_coefficients(&ShearProfile::couette(), 32).unwrap();
        assert!(pair.f.iter().all(|&f| f == 0.0));
        assert!(pair.g.iter().all(|&g| g == 1.0));
        assert!(pair.dg.iter().chain(&pair.df).chain(&pair.d2g).all(|&v| v == 0.0));
    }

    #[test]
    fn quadratic_matches_closed_form_inverse() {
        let p = ShearProfile::quadratic(0.25).unwrap();
        let pair = build_coefficients(&p, 64).unwrap();
        assert!((pair.scale - 1.25).abs() < 1e-15);
        for (i, &z) in pair.nodes.iter().enumerate() {
            // unnormalized velocity coordinate
            let w = 1.25 * z;
            let yinv = 2.0 * ((1.0 + w).sqrt() - 1.0);
            assert!((p.invert(w).unwrap() - yinv).abs() < 1e-12);
            assert!((pair.g[i] - (1.0 + ((1.0 + w).sqrt() - 1.0))).abs() < 1e-12);
            assert!((pair.f[i] - 0.5).abs() < 1e-15);
            // g' = scale * f / g
            assert!((pair.dg[i] - 1.25 * 0.5 / pair.g[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_profile_is_rejected() {
        let r = ShearProfile::new(
            "sine",
            Arc::new(|y| (2.0 * std::f64::consts::PI * y).sin()),
            None,
            None,
            (0.0, 1.0),
            None,
        );
        assert!(matches!(r, Err(ProfileError::NonMonotone { .. })));
        let explicit = ShearProfile::new("steep", Arc::new(|y| 5.0 * y), None, None, (0.0, 1.0), Some(0.5));
        assert!(matches!(explicit, Err(ProfileError::NonMonotone { .. })));
    }

    #[test]
    fn finite_difference_derivatives_agree_with_analytic() {
        let p = ShearProfile::new("q", Arc::new(|y: f64| y + 0.25 * y * y + 0.1 * y.powi(3)), None, None, (0.0, 1.0), None)
            .unwrap();
        for y in [0.0, 0.3, 0.77, 1.0] {
            assert!((p.du(y) - (1.0 + 0.5 * y + 0.3 * y * y)).abs() < 1e-10);
            assert!((p.d2u(y) - (0.5 + 0.6 * y)).abs() < 1e-9);
        }
    }

    #[test]
    fn round_trip_inversion() {
        let p = ShearProfile::tanh(1.5).unwrap();
        let pair = build_coefficients(&p, 65).unwrap();
        for &z in &pair.nodes {
            let target = pair.shift + pair.scale * z;
            let y = p.invert(target).unwrap();
            assert!((p.u(y) - target).abs() < 1e-10);
        }
    }

    #[test]
    fn regularity_report() {
        let couette = build_coefficients(&ShearProfile::couette(), 32).unwrap();
        let r = validate_regularity(&couette, 3);
        assert_eq!(r.f_bounds, vec![0.0; 4]);
        assert_eq!(&r.g_bounds[1..], &[0.0; 3]);
        assert_eq!(r.g2_jump, 0.0);
        assert!(r.flags.is_empty());

        let q = build_coefficients(&ShearProfile::quadratic(0.25).unwrap(), 32).unwrap();
        let r = validate_regularity(&q, 2);
        assert!((r.g2_jump - 1.25).abs() < 1e-12);
        assert_eq!(r.flags.len(), 1);
    }

    #[test]
    fn tabulated_profile_reproduces_smooth_flow() {
        let ys: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let us: Vec<f64> = ys.iter().map(|y| y + 0.25 * y * y).collect();
        let p = ShearProfile::from_table(ys, us).unwrap();
        assert!((p.du(0.5) - 1.25).abs() < 1e-6);
        assert!((p.d2u(0.5) - 0.5).abs() < 1e-4);
    }
}

//! The shifted elliptic problem `(-1 + (g(∂/k + it))²) Φ = W`, `Φ = 0` at
//! both walls, and its homogeneous-solution machinery.
//!
//! Modes carry the phase `e^{-ikx}`, so the stream function picks up the
//! factor `e^{-ikty}` near the walls and the homogeneous solutions are
//! `u₁(t, y) = e^{-ikty} u₁(y)`, `u₂(t, y) = e^{-ikt(y-1)} u₂(y)`. With this
//! choice Couette flow with `W ≡ 1`, `k = 1` has `∂_yΦ(0) ≈ 1/(it)`.

use crate::grid::{apply_real, inner_product, Grid, GridError};
use crate::profiles::CoefficientPair;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("discrete operator is singular at k = {k}, t = {t}; increase the resolution")]
    SingularSystem { k: f64, t: f64 },
    #[error("wavenumber must be nonzero")]
    ZeroWavenumber,
    #[error("coefficients sampled on {coeffs} nodes but grid has {grid}")]
    GridMismatch { coeffs: usize, grid: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Output of one Dirichlet solve.
#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub phi: Vec<Complex64>,
    /// `(∂_y/k + it) Φ`.
    pub shifted_d: Vec<Complex64>,
    /// `∂_yΦ` at `y = 0` and `y = 1`.
    pub dphi_bdry: (Complex64, Complex64),
    /// Max-norm residual of the unscaled discrete equation on interior rows.
    pub residual: f64,
    pub k: f64,
    pub t: f64,
}

/// Solutions of `(-k² + (g∂)²) u = 0` with `u₁(0) = u₂(1) = 1`,
/// `u₁(1) = u₂(0) = 0`.
#[derive(Debug, Clone)]
pub struct HomogeneousPair {
    pub u1: Vec<Complex64>,
    pub u2: Vec<Complex64>,
    pub k: f64,
    pub residual: f64,
}

fn check(k: f64, g: &CoefficientPair, grid: &Grid, w_len: Option<usize>) -> Result<(), EllipticError> {
    if k == 0.0 || !k.is_finite() {
        return Err(EllipticError::ZeroWavenumber);
    }
    if g.n_samples() != grid.len() {
        return Err(EllipticError::GridMismatch {
            coeffs: g.n_samples(),
            grid: grid.len(),
        });
    }
    if let Some(len) = w_len {
        if len != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: len,
            }
            .into());
        }
    }
    Ok(())
}

/// Applies the shifted operator to `phi` (all rows, no boundary treatment).
pub fn apply_operator(phi: &[Complex64], k: f64, t: f64, g: &CoefficientPair, grid: &Grid) -> Vec<Complex64> {
    let d1 = grid.diff(phi);
    let d2 = grid.diff2(phi);
    (0..phi.len())
        .map(|i| {
            let gi = g.g[i];
            let gg = gi * g.dg[i];
            let dphi = d1[i] / k + I * t * phi[i];
            let ddphi = d2[i] / (k * k) + 2.0 * I * t * d1[i] / k - t * t * phi[i];
            -phi[i] + gi * gi * ddphi + gg / k * dphi
        })
        .collect()
}

fn interior_residual(phi: &[Complex64], w: &[Complex64], k: f64, t: f64, g: &CoefficientPair, grid: &Grid) -> f64 {
    let lphi = apply_operator(phi, k, t, g, grid);
    let n = phi.len();
    (1..n - 1).map(|i| (lphi[i] - w[i]).norm()).fold(0.0, f64::max)
}

fn pack(phi: Vec<Complex64>, residual: f64, k: f64, t: f64, grid: &Grid) -> EllipticSolution {
    let d1 = grid.diff(&phi);
    let shifted_d = phi.iter().zip(&d1).map(|(p, d)| d / k + I * t * p).collect();
    let n = phi.len();
    EllipticSolution {
        dphi_bdry: (d1[0], d1[n - 1]),
        phi,
        shifted_d,
        residual,
        k,
        t,
    }
}

/// Direct solve with the complex, time-dependent operator.
///
/// Rows are scaled by `1/(1 + t²)` before a dense LU factorization; the
/// first and last rows are replaced by the Dirichlet conditions.
pub fn solve_dirichlet(
    w: &[Complex64],
    k: f64,
    t: f64,
    g: &CoefficientPair,
    grid: &Grid,
) -> Result<EllipticSolution, EllipticError> {
    check(k, g, grid, Some(w.len()))?;
    let n = grid.len();
    let scale = 1.0 / (1.0 + t * t);
    let d1 = grid.d1();
    let d2 = grid.d2();
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    let mut rhs = DVector::<Complex64>::zeros(n);
    for i in 1..n - 1 {
        let g2 = g.g[i] * g.g[i];
        let gg = g.g[i] * g.dg[i];
        let c2 = g2 / (k * k);
        let c1 = 2.0 * I * t * g2 / k + gg / (k * k);
        let c0 = -1.0 - g2 * t * t + I * t * gg / k;
        for j in 0..n {
            a[(i, j)] = (c2 * d2[(i, j)] + c1 * d1[(i, j)]) * scale;
        }
        a[(i, i)] += c0 * scale;
        rhs[i] = w[i] * scale;
    }
    a[(0, 0)] = Complex64::new(1.0, 0.0);
    a[(n - 1, n - 1)] = Complex64::new(1.0, 0.0);
    let lu = a.lu();
    let diag: Vec<f64> = lu.u().diagonal().iter().map(|z| z.norm()).collect();
    let dmax = diag.iter().copied().fold(0.0, f64::max);
    let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if !(dmin > 1e-14 * dmax) {
        return Err(EllipticError::SingularSystem { k, t });
    }
    let phi = lu
        .solve(&rhs)
        .ok_or(EllipticError::SingularSystem { k, t })?
        .as_slice()
        .to_vec();
    let residual = interior_residual(&phi, w, k, t, g, grid);
    Ok(pack(phi, residual, k, t, grid))
}

/// The real, time-independent operator `-k² + g²∂² + gg'∂` with Dirichlet
/// rows.
fn unshifted_matrix(k: f64, g: &CoefficientPair, grid: &Grid) -> DMatrix<f64> {
    let n = grid.len();
    let d1 = grid.d1();
    let d2 = grid.d2();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 1..n - 1 {
        let g2 = g.g[i] * g.g[i];
        let gg = g.g[i] * g.dg[i];
        for j in 0..n {
            s[(i, j)] = g2 * d2[(i, j)] + gg * d1[(i, j)];
        }
        s[(i, i)] -= k * k;
    }
    s[(0, 0)] = 1.0;
    s[(n - 1, n - 1)] = 1.0;
    s
}

pub fn homogeneous_pair(k: f64, g: &CoefficientPair, grid: &Grid) -> Result<HomogeneousPair, EllipticError> {
    check(k, g, grid, None)?;
    let n = grid.len();
    let s = unshifted_matrix(k, g, grid);
    let lu = s.clone().lu();
    let mut rhs = DMatrix::<f64>::zeros(n, 2);
    rhs[(0, 0)] = 1.0;
    rhs[(n - 1, 1)] = 1.0;
    let sol = lu.solve(&rhs).ok_or(EllipticError::SingularSystem { k, t: 0.0 })?;
    let r = &s * &sol - &rhs;
    let residual = r.rows(1, n - 2).amax();
    let col = |c: usize| (0..n).map(|i| Complex64::new(sol[(i, c)], 0.0)).collect::<Vec<_>>();
    Ok(HomogeneousPair {
        u1: col(0),
        u2: col(1),
        k,
        residual,
    })
}

impl HomogeneousPair {
    /// `u₁(t, y) = e^{-ikty} u₁(y)` and `u₂(t, y) = e^{-ikt(y-1)} u₂(y)`.
    pub fn at_time(&self, t: f64, grid: &Grid) -> (Vec<Complex64>, Vec<Complex64>) {
        let kt = self.k * t;
        let u1 = grid
            .nodes()
            .iter()
            .zip(&self.u1)
            .map(|(&y, u)| u * Complex64::from_polar(1.0, -kt * y))
            .collect();
        let u2 = grid
            .nodes()
            .iter()
            .zip(&self.u2)
            .map(|(&y, u)| u * Complex64::from_polar(1.0, -kt * (y - 1.0)))
            .collect();
        (u1, u2)
    }
}

/// Wall derivatives of `Φ` from pairings of `W` with the time-dependent
/// homogeneous solutions:
/// `∂_yΦ(0) = -(k²/g(0)) ∫ conj(u₁(t)) W / g`,
/// `∂_yΦ(1) = (k²/g(1)) ∫ conj(u₂(t)) W / g`.
pub fn boundary_derivative_formula(
    w: &[Complex64],
    t: f64,
    pair: &HomogeneousPair,
    g: &CoefficientPair,
    grid: &Grid,
) -> Result<(Complex64, Complex64), EllipticError> {
    check(pair.k, g, grid, Some(w.len()))?;
    let k2 = pair.k * pair.k;
    let n = grid.len();
    let (u1, u2) = pair.at_time(t, grid);
    let wg: Vec<Complex64> = w.iter().zip(&g.g).map(|(w, g)| w / *g).collect();
    let left = -k2 / g.g[0] * inner_product(&u1, &wg, grid)?;
    let right = k2 / g.g[n - 1] * inner_product(&u2, &wg, grid)?;
    Ok((left, right))
}

/// Splits `∂_yΦ = Φ¹ + H¹` where `Φ¹` solves the Dirichlet problem forced
/// by `∂_yW` plus the commutator `[(g(∂/k + it))², ∂_y]Φ`, and `H¹` solves
/// the homogeneous equation with the wall values of `∂_yΦ`.
pub fn split_first_derivative(
    phi: &EllipticSolution,
    w: &[Complex64],
    g: &CoefficientPair,
    grid: &Grid,
) -> Result<(Vec<Complex64>, Vec<Complex64>), EllipticError> {
    let (k, t) = (phi.k, phi.t);
    check(k, g, grid, Some(w.len()))?;
    let dw = grid.diff(w);
    let d1 = grid.diff(&phi.phi);
    let d2 = grid.diff2(&phi.phi);
    let forcing: Vec<Complex64> = (0..w.len())
        .map(|i| {
            let gg = g.g[i] * g.dg[i];
            let ggp = g.dg[i] * g.dg[i] + g.g[i] * g.d2g[i];
            let dd = d2[i] / (k * k) + 2.0 * I * t * d1[i] / k - t * t * phi.phi[i];
            dw[i] - 2.0 * gg * dd - ggp / k * phi.shifted_d[i]
        })
        .collect();
    let phi1 = solve_dirichlet(&forcing, k, t, g, grid)?.phi;
    let h1 = d1.iter().zip(&phi1).map(|(a, b)| a - b).collect();
    Ok((phi1, h1))
}

/// `H¹` rebuilt from its wall values and the homogeneous pair.
pub fn homogeneous_expansion(
    wall: (Complex64, Complex64),
    t: f64,
    pair: &HomogeneousPair,
    grid: &Grid,
) -> Vec<Complex64> {
    let (u1, u2) = pair.at_time(t, grid);
    u1.iter().zip(&u2).map(|(a, b)| wall.0 * a + wall.1 * b).collect()
}

/// Precomputed solver for a fixed `(k, g)`.
///
/// Writing `Φ = e^{-ikty} ψ` turns the shifted operator into the real,
/// time-independent `k^{-2}(-k² + g²∂² + gg'∂)`, so every solve is one
/// matrix-vector product with a stored inverse.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    k: f64,
    inverse: DMatrix<f64>,
    nodes: Vec<f64>,
}

impl ModeOperator {
    pub fn new(k: f64, g: &CoefficientPair, grid: &Grid) -> Result<Self, EllipticError> {
        check(k, g, grid, None)?;
        let mut s = unshifted_matrix(k, g, grid);
        let n = grid.len();
        for i in 1..n - 1 {
            for j in 0..n {
                s[(i, j)] /= k * k;
            }
        }
        let inverse = s.try_inverse().ok_or(EllipticError::SingularSystem { k, t: 0.0 })?;
        if inverse.iter().any(|x| !x.is_finite()) {
            return Err(EllipticError::SingularSystem { k, t: 0.0 });
        }
        Ok(ModeOperator {
            k,
            inverse,
            nodes: grid.nodes().to_vec(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Gauge-transformed solution `ψ = e^{ikty} Φ`.
    pub fn solve_gauge(&self, w: &[Complex64], t: f64) -> Vec<Complex64> {
        let kt = self.k * t;
        let n = self.nodes.len();
        let mut rhs: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(w)
            .map(|(&y, w)| w * Complex64::from_polar(1.0, kt * y))
            .collect();
        rhs[0] = Complex64::new(0.0, 0.0);
        rhs[n - 1] = Complex64::new(0.0, 0.0);
        apply_real(&self.inverse, &rhs)
    }

    /// `Φ` at time `t`.
    pub fn solve_phi(&self, w: &[Complex64], t: f64) -> Vec<Complex64> {
        self.ungauge(self.solve_gauge(w, t), t)
    }

    fn ungauge(&self, mut psi: Vec<Complex64>, t: f64) -> Vec<Complex64> {
        let kt = self.k * t;
        for (p, &y) in psi.iter_mut().zip(&self.nodes) {
            *p *= Complex64::from_polar(1.0, -kt * y);
        }
        psi
    }

    /// Full solution record including the residual of the direct operator.
    pub fn solve(
        &self,
        w: &[Complex64],
        t: f64,
        g: &CoefficientPair,
        grid: &Grid,
    ) -> Result<EllipticSolution, EllipticError> {
        check(self.k, g, grid, Some(w.len()))?;
        let k = self.k;
        let psi = self.solve_gauge(w, t);
        let dpsi = grid.diff(&psi);
        let kt = k * t;
        let n = psi.len();
        let shifted_d = dpsi
            .iter()
            .zip(&self.nodes)
            .map(|(d, &y)| d / k * Complex64::from_polar(1.0, -kt * y))
            .collect();
        let dphi_bdry = (dpsi[0], dpsi[n - 1] * Complex64::from_polar(1.0, -kt));
        let phi = self.ungauge(psi, t);
        let residual = interior_residual(&phi, w, k, t, g, grid);
        Ok(EllipticSolution {
            phi,
            shifted_d,
            dphi_bdry,
            residual,
            k,
            t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{build_coefficients, ShearProfile};

    fn setup(profile: &ShearProfile, n: usize) -> (CoefficientPair, Grid) {
        let c = build_coefficients(profile, n).unwrap();
        let m = (n as f64).log2().ceil() as u32;
        (c, Grid::new(n, m).unwrap())
    }

    fn ones(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    #[test]
    fn couette_pair_is_hyperbolic_sine() {
        let (c, grid) = setup(&ShearProfile::couette(), 48);
        let pair = homogeneous_pair(1.0, &c, &grid).unwrap();
        let s1 = 1f64.sinh();
        for (i, &y) in grid.nodes().iter().enumerate() {
            assert!((pair.u1[i].re - (1.0 - y).sinh() / s1).abs() < 1e-9);
            assert!((pair.u2[i].re - y.sinh() / s1).abs() < 1e-9);
        }
        assert!(pair.residual < 1e-8);
    }

    #[test]
    fn zero_data_gives_zero() {
        let (c, grid) = setup(&ShearProfile::quadratic(0.25).unwrap(), 32);
        let s = solve_dirichlet(&vec![Complex64::new(0.0, 0.0); 32], 1.0, 5.0, &c, &grid).unwrap();
        assert!(s.phi.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn couette_boundary_derivative_near_one_over_it() {
        let (c, grid) = setup(&ShearProfile::couette(), 96);
        for t in [10.0, 30.0] {
            let s = solve_dirichlet(&ones(96), 1.0, t, &c, &grid).unwrap();
            let target = 1.0 / (I * t);
            assert!((s.dphi_bdry.0 - target).norm() < 3.0 / (t * t));
            assert!(s.residual <= 1e-8 * (1.0 + t * t));
        }
    }

    #[test]
    fn fast_solver_matches_direct() {
        let (c, grid) = setup(&ShearProfile::quadratic(0.25).unwrap(), 64);
        let w = grid.sample(|y| Complex64::new(1.0 + 0.5 * (2.0 * std::f64::consts::PI * y).cos(), 0.2 * y));
        let op = ModeOperator::new(-2.0, &c, &grid).unwrap();
        for t in [0.0, 3.0, 12.0] {
            let direct = solve_dirichlet(&w, -2.0, t, &c, &grid).unwrap();
            let fast = op.solve(&w, t, &c, &grid).unwrap();
            for (a, b) in direct.phi.iter().zip(&fast.phi) {
                assert!((a - b).norm() < 1e-11);
            }
            for (a, b) in direct.shifted_d.iter().zip(&fast.shifted_d) {
                assert!((a - b).norm() < 1e-9);
            }
            assert!((direct.dphi_bdry.1 - fast.dphi_bdry.1).norm() < 1e-9);
        }
    }
}

//! Wall-bounded Chebyshev discretization of `[0, 1]`.
//!
//! Nodes are Chebyshev–Gauss–Lobatto points mapped to `[0, 1]` in ascending
//! order, so index `0` is the wall `y = 0` and index `n - 1` the wall `y = 1`.
//! Periodic (torus) norms are computed after barycentric resampling onto a
//! uniform grid of `2^m` points `j / 2^m`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs at least 16 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("uniform resolution 2^{m} is smaller than the node count {n}")]
    UniformTooCoarse { n: usize, m: u32 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("uniform sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("grid self-check failed: {0}")]
    SelfCheck(String),
}

/// Chebyshev collocation grid with differentiation, quadrature and
/// uniform resampling.
#[derive(Debug, Clone)]
pub struct Grid {
    nodes: Vec<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
    quad_weights: Vec<f64>,
    bary_weights: Vec<f64>,
    uniform_exp: u32,
}

impl Grid {
    /// Builds an `n`-node grid with a `2^m`-point uniform resampling target
    /// and runs the construction-time invariant checks.
    pub fn new(n: usize, m: u32) -> Result<Self, GridError> {
        if n < 16 {
            return Err(GridError::TooFewNodes(n));
        }
        if m >= usize::BITS || (1usize << m) < n {
            return Err(GridError::UniformTooCoarse { n, m });
        }
        let nodes = cgl_nodes(n);
        let d1 = cheb_diff(n);
        let d2 = second_derivative(&d1);
        let quad_weights = clenshaw_curtis(n);
        let bary_weights = (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n - 1 {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let grid = Grid {
            nodes,
            d1,
            d2,
            quad_weights,
            bary_weights,
            uniform_exp: m,
        };
        grid.self_check()?;
        Ok(grid)
    }

    fn self_check(&self) -> Result<(), GridError> {
        let n = self.len();
        let ones = vec![1.0; n];
        let d_const = self.d1.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max);
        if d_const > 1e-12 * (n * n) as f64 {
            return Err(GridError::SelfCheck(format!("D1 of constant = {d_const:e}")));
        }
        let q: f64 = self.quad_weights.iter().zip(&ones).map(|(w, o)| w * o).sum();
        if (q - 1.0).abs() > 1e-12 {
            return Err(GridError::SelfCheck(format!("quadrature of 1 = {q}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        &self.d2
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn uniform_len(&self) -> usize {
        1 << self.uniform_exp
    }

    pub fn uniform_exp(&self) -> u32 {
        self.uniform_exp
    }

    /// Uniform torus points `j / 2^m`, `j = 0..2^m`.
    pub fn uniform_nodes(&self) -> Vec<f64> {
        let m = self.uniform_len();
        (0..m).map(|j| j as f64 / m as f64).collect()
    }

    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.nodes.iter().map(|&y| f(y)).collect()
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&y| f(y)).collect()
    }

    pub fn diff(&self, u: &[Complex64]) -> Vec<Complex64> {
        apply_real(&self.d1, u)
    }

    pub fn diff2(&self, u: &[Complex64]) -> Vec<Complex64> {
        apply_real(&self.d2, u)
    }

    pub fn diff_real(&self, u: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(u);
        (&self.d1 * v).as_slice().to_vec()
    }

    /// First derivative at the two walls, read from the boundary rows of D1.
    pub fn wall_derivatives(&self, u: &[Complex64]) -> (Complex64, Complex64) {
        let n = self.len();
        (row_dot(&self.d1, 0, u), row_dot(&self.d1, n - 1, u))
    }

    /// Second derivative at the two walls, from the boundary rows of D2.
    pub fn wall_second_derivatives(&self, u: &[Complex64]) -> (Complex64, Complex64) {
        let n = self.len();
        (row_dot(&self.d2, 0, u), row_dot(&self.d2, n - 1, u))
    }

    /// Clenshaw–Curtis quadrature of `u` over `[0, 1]`.
    pub fn integrate(&self, u: &[Complex64]) -> Complex64 {
        self.quad_weights.iter().zip(u).map(|(w, x)| x * *w).sum()
    }

    pub fn l2_norm(&self, u: &[Complex64]) -> f64 {
        self.quad_weights
            .iter()
            .zip(u)
            .map(|(w, x)| w * x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Barycentric interpolation of nodal data at an arbitrary point of `[0, 1]`.
    pub fn interpolate(&self, u: &[Complex64], y: f64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for ((&yj, &wj), &uj) in self.nodes.iter().zip(&self.bary_weights).zip(u) {
            let diff = y - yj;
            if diff == 0.0 {
                return uj;
            }
            let c = wj / diff;
            num += uj * c;
            den += c;
        }
        num / den
    }

    /// Resamples nodal data onto the `2^m` uniform torus points.
    pub fn to_uniform(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.uniform_nodes()
            .into_iter()
            .map(|y| self.interpolate(u, y))
            .collect()
    }

    /// Resamples onto `count + 1` uniform points including both walls.
    pub fn to_uniform_closed(&self, u: &[Complex64], count: usize) -> Vec<Complex64> {
        (0..=count)
            .map(|j| self.interpolate(u, j as f64 / count as f64))
            .collect()
    }
}

/// Weighted L² pairing on the grid, conjugate-linear in the first slot.
pub fn inner_product(u: &[Complex64], v: &[Complex64], grid: &Grid) -> Result<Complex64, GridError> {
    let n = grid.len();
    for len in [u.len(), v.len()] {
        if len != n {
            return Err(GridError::LengthMismatch { expected: n, got: len });
        }
    }
    Ok(grid
        .quad_weights
        .iter()
        .zip(u.iter().zip(v))
        .map(|(w, (a, b))| a.conj() * b * *w)
        .sum())
}

/// Discrete Fourier coefficients of uniform torus samples, normalized so that
/// `e^{2πiy}` has coefficient 1 at frequency 1 and Parseval reads
/// `Σ|û_n|² = ∫|u|²`.
pub fn dft_coefficients(u: &[Complex64]) -> Result<Vec<Complex64>, GridError> {
    let len = u.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(GridError::NotPowerOfTwo(len));
    }
    let mut buf = u.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Ok(buf)
}

/// Signed frequency of FFT bin `j` for a transform of length `len`.
pub fn frequency(j: usize, len: usize) -> i64 {
    if j <= len / 2 {
        j as i64
    } else {
        j as i64 - len as i64
    }
}

fn cgl_nodes(n: usize) -> Vec<f64> {
    let big_n = (n - 1) as f64;
    // x_j = cos(πj/N) written as a sine for exact symmetry; y = (1 - x)/2.
    (0..n)
        .map(|j| {
            let x = (PI * (big_n - 2.0 * j as f64) / (2.0 * big_n)).sin();
            0.5 * (1.0 - x)
        })
        .collect()
}

/// First-derivative matrix on `[0, 1]` for the ascending node ordering.
fn cheb_diff(n: usize) -> DMatrix<f64> {
    let big_n = n - 1;
    let nf = big_n as f64;
    let c = |j: usize| -> f64 {
        let base = if j == 0 || j == big_n { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                // x_i - x_j via a product of sines, which avoids cancellation.
                let dx = -2.0
                    * (PI * (i + j) as f64 / (2.0 * nf)).sin()
                    * (PI * (i as f64 - j as f64) / (2.0 * nf)).sin();
                d[(i, j)] = c(i) / c(j) / dx;
            }
        }
    }
    negative_sum_diagonal(&mut d);
    // d/dy = -2 d/dx
    d *= -2.0;
    d
}

fn second_derivative(d1: &DMatrix<f64>) -> DMatrix<f64> {
    let mut d2 = d1 * d1;
    negative_sum_diagonal(&mut d2);
    d2
}

fn negative_sum_diagonal(d: &mut DMatrix<f64>) {
    let n = d.nrows();
    for i in 0..n {
        d[(i, i)] = 0.0;
        let s: f64 = d.row(i).iter().sum();
        d[(i, i)] = -s;
    }
}

/// Clenshaw–Curtis weights for the CGL nodes, scaled to `[0, 1]`.
fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let big_n = n - 1;
    let nf = big_n as f64;
    let mut w = vec![0.0; n];
    let theta = |j: usize| PI * j as f64 / nf;
    if big_n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[big_n] = w[0];
        for (i, wi) in w.iter_mut().enumerate().take(big_n).skip(1) {
            let mut v = 1.0;
            for k in 1..big_n / 2 {
                v -= 2.0 * (2.0 * k as f64 * theta(i)).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
            v -= (nf * theta(i)).cos() / (nf * nf - 1.0);
            *wi = 2.0 * v / nf;
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[big_n] = w[0];
        for (i, wi) in w.iter_mut().enumerate().take(big_n).skip(1) {
            let mut v = 1.0;
            for k in 1..=(big_n - 1) / 2 {
                v -= 2.0 * (2.0 * k as f64 * theta(i)).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
            *wi = 2.0 * v / nf;
        }
    }
    w.iter().map(|x| 0.5 * x).collect()
}

fn row_dot(m: &DMatrix<f64>, row: usize, u: &[Complex64]) -> Complex64 {
    m.row(row).iter().zip(u).map(|(a, b)| b * *a).sum()
}

/// Applies a real matrix to complex data (real and imaginary parts as two
/// columns of one product).
pub(crate) fn apply_real(m: &DMatrix<f64>, u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len();
    let mut cols = DMatrix::<f64>::zeros(n, 2);
    for (i, z) in u.iter().enumerate() {
        cols[(i, 0)] = z.re;
        cols[(i, 1)] = z.im;
    }
    let out = m * cols;
    (0..m.nrows())
        .map(|i| Complex64::new(out[(i, 0)], out[(i, 1)]))
        .collect()
}

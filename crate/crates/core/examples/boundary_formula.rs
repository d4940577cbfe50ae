//! Wall derivatives of the stream function from the homogeneous solutions,
//! checked against direct solves, and the `H¹` splitting of `∂_yΦ`.

use channel_damping::elliptic::{
    boundary_derivative_formula, homogeneous_expansion, homogeneous_pair, solve_dirichlet, split_first_derivative,
};
use channel_damping::grid::Grid;
use channel_damping::profiles::{build_coefficients, ShearProfile};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(256, 9)?;
    let coeffs = build_coefficients(&ShearProfile::tanh(2.0)?, grid.len())?;
    let k = 1.5;
    let pair = homogeneous_pair(k, &coeffs, &grid)?;
    let w = grid.sample(|y| Complex64::new(1.0 + 0.5 * (2.0 * std::f64::consts::PI * y).cos(), 0.0));
    for t in [0.0, 1.0, 10.0, 100.0] {
        let sol = solve_dirichlet(&w, k, t, &coeffs, &grid)?;
        let formula = boundary_derivative_formula(&w, t, &pair, &coeffs, &grid)?;
        let (_, h1) = split_first_derivative(&sol, &w, &coeffs, &grid)?;
        let expansion = homogeneous_expansion(sol.dphi_bdry, t, &pair, &grid);
        let gap = h1.iter().zip(&expansion).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!(
            "t = {t:>5}: |direct - formula| = {:.2e} / {:.2e}, sup |H1 - expansion| = {gap:.2e}",
            (sol.dphi_bdry.0 - formula.0).norm(),
            (sol.dphi_bdry.1 - formula.1).norm()
        );
    }
    Ok(())
}

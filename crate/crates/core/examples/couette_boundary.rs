//! Wall derivative of the stream function for Couette flow with constant
//! vorticity, compared with its leading asymptotics `1/(it)`.

use channel_damping::elliptic::solve_dirichlet;
use channel_damping::grid::Grid;
use channel_damping::profiles::{build_coefficients, ShearProfile};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(672, 12)?;
    let coeffs = build_coefficients(&ShearProfile::couette(), grid.len())?;
    let w = grid.sample(|_| Complex64::new(1.0, 0.0));
    println!("{:>8} {:>24} {:>14}", "t", "dphi(0)", "t^2 |defect|");
    for t in [10.0, 30.0, 100.0, 300.0, 1000.0] {
        let sol = solve_dirichlet(&w, 1.0, t, &coeffs, &grid)?;
        let d0 = sol.dphi_bdry.0;
        let defect = (d0 - 1.0 / Complex64::new(0.0, t)).norm();
        println!("{t:>8} {:>24} {:>14.6}", format!("{:.6e}{:+.6e}i", d0.re, d0.im), t * t * defect);
    }
    Ok(())
}

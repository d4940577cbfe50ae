//! Evolves one mode over the quadratic flow and prints the decay of the
//! velocity and the growth of the wall trace of `∂_yW`.

use channel_damping::config::recommended_nodes;
use channel_damping::diagnostics::velocity_norms;
use channel_damping::evolve::{run, InitialData, ModeSystem, RunSpec};
use channel_damping::grid::Grid;
use channel_damping::profiles::{build_coefficients, ShearProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = RunSpec {
        t_end: 200.0,
        ..RunSpec::default()
    };
    let n = recommended_nodes(1.0, spec.t_end);
    let grid = Grid::new(n, 10)?;
    let coeffs = build_coefficients(&ShearProfile::quadratic(0.25)?, n)?;
    let sys = ModeSystem::new(1.0, &coeffs, &grid)?;
    let series = run(InitialData::Constant.sample(&grid), &sys, &spec)?;
    println!("{} steps, step-doubling error estimate {:.2e}", series.steps, series.error_estimate);
    println!("{:>9} {:>12} {:>12} {:>12} {:>12}", "t", "|W|_L2", "|v|", "|v2|", "|dW(0)|");
    for snap in series.snapshots.iter().step_by(2) {
        let (v, v2) = velocity_norms(&snap.solution, &coeffs, &grid);
        let (dw0, _) = grid.wall_derivatives(&snap.w);
        println!("{:>9.2} {:>12.6} {:>12.4e} {:>12.4e} {:>12.6}", snap.t, grid.l2_norm(&snap.w), v, v2, dw0.norm());
    }
    Ok(())
}

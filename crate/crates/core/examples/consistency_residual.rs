//! Nonlinear residual `g(∇^⊥Φ·∇W)` of the real mode pair `k = ±1`, built
//! from a single linear run.

use channel_damping::config::recommended_nodes;
use channel_damping::evolve::{run, InitialData, ModeSystem, RunSpec};
use channel_damping::experiment::consistency_from_runs;
use channel_damping::grid::Grid;
use channel_damping::profiles::{build_coefficients, ShearProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = RunSpec {
        t_end: 300.0,
        ..RunSpec::default()
    };
    let n = recommended_nodes(1.0, spec.t_end);
    let grid = Grid::new(n, 11)?;
    let coeffs = build_coefficients(&ShearProfile::quadratic(0.25)?, n)?;
    let series = run(InitialData::Sin.sample(&grid), &ModeSystem::new(1.0, &coeffs, &grid)?, &spec)?;
    let c = consistency_from_runs(&[series], &coeffs, &grid, 16, spec.t_end)?;
    for (t, r) in c.samples.iter().step_by(3) {
        println!("t = {t:>8.2}: residual {r:.4e}");
    }
    if let Some(f) = c.fit {
        println!("fitted exponent {:.3} (r2 {:.3})", f.alpha, f.r2);
    }
    Ok(())
}

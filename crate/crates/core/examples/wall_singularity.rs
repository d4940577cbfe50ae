//! Wall traces of `∂_yW` and `∂_y²W`: logarithmic growth for general data,
//! convergence of `∂_yW` for data vanishing at the walls.

use channel_damping::config::recommended_nodes;
use channel_damping::diagnostics::boundary_singularity_monitor;
use channel_damping::evolve::{run, InitialData, ModeSystem, RunSpec};
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
    let sys = ModeSystem::new(1.0, &coeffs, &grid)?;
    for data in [InitialData::Constant, InitialData::Sin] {
        let series = run(data.sample(&grid), &sys, &spec)?;
        let mon = boundary_singularity_monitor(&series, data.is_zero_dirichlet());
        let show = |f: &Option<channel_damping::diagnostics::RateFit>| {
            f.as_ref().map_or("n/a".to_string(), |f| format!("{:.3} (r2 {:.4})", f.alpha, f.r2))
        };
        println!("{data:?}");
        println!("  dW log slopes  {} / {}", show(&mon.dw_fits.0), show(&mon.dw_fits.1));
        println!("  d2W log slopes {} / {}", show(&mon.d2w_fits.0), show(&mon.d2w_fits.1));
        if let Some((a, b)) = mon.limits {
            println!("  dW limits {a:.4} / {b:.4} (converged: {})", mon.dw_converged);
        }
    }
    Ok(())
}

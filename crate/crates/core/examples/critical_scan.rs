//! Bounded-versus-growing verdicts for interval Sobolev norms on either side
//! of the critical exponent 3/2 (general data) and 5/2 (zero-Dirichlet data).

use channel_damping::config::recommended_nodes;
use channel_damping::diagnostics::critical_scan;
use channel_damping::evolve::{run, InitialData, ModeSystem, RunSpec};
use channel_damping::grid::Grid;
use channel_damping::norms::{norm_report, NormPlan};
use channel_damping::profiles::{build_coefficients, ShearProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = RunSpec {
        t_end: 400.0,
        ..RunSpec::default()
    };
    let n = recommended_nodes(1.0, spec.t_end);
    let grid = Grid::new(n, 11)?;
    let coeffs = build_coefficients(&ShearProfile::quadratic(0.25)?, n)?;
    let sys = ModeSystem::new(1.0, &coeffs, &grid)?;
    for (data, s_list) in [(InitialData::Constant, [1.25, 1.75]), (InitialData::Sin, [2.25, 2.75])] {
        let series = run(data.sample(&grid), &sys, &spec)?;
        let plan = NormPlan {
            interval_s: s_list.to_vec(),
            ..NormPlan::default()
        };
        let snaps: Vec<_> = series.snapshots.iter().filter(|s| s.t >= 1.0).collect();
        let reports = snaps
            .iter()
            .map(|s| norm_report(s.t, &s.w, &grid, &plan))
            .collect::<Result<Vec<_>, _>>()?;
        let times: Vec<f64> = snaps.iter().map(|s| s.t).collect();
        let norms: Vec<(f64, Vec<f64>)> = s_list
            .iter()
            .enumerate()
            .map(|(j, &s)| (s, reports.iter().map(|r| r.hs_interval[j].1).collect()))
            .collect();
        for e in critical_scan(&times, &norms)? {
            println!("{data:?}: s = {} -> {:?} (last-decade max/median {:.3})", e.s, e.verdict, e.last_decade_ratio);
        }
    }
    Ok(())
}

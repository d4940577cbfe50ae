//! Loads a preset, shortens it and writes the full set of outputs
//! (CSV, summary, manifest, plot script) to a directory.

use channel_damping::config::{preset, RunConfig};
use channel_damping::experiment::{report, run_experiment};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("damping-example"));
    let mut cfg = preset("damping-zero-dirichlet")?;
    cfg.name = "short-run".into();
    cfg.t_end = 100.0;
    cfg.grid.n = 128;
    cfg.grid.m = 8;
    cfg.s_grid = vec![1.25, 2.25];
    let text = cfg.to_toml();
    println!("{text}");
    let cfg = RunConfig::from_toml(&text)?;
    let artifacts = run_experiment(&cfg, &out, 1)?;
    for f in &artifacts.files {
        println!("wrote {}", f.display());
    }
    print!("{}", report(&out)?);
    Ok(())
}

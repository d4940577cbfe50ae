//! Torus and interval Sobolev norms, the `B_n` equivalence constants and
//! the kernel form of the torus seminorm.

use channel_damping::corpus;
use channel_damping::grid::Grid;
use channel_damping::norms::{bn_constants, hs_interval, hs_torus, torus_fourier_seminorm, torus_kernel_seminorm, traces, wsp_interval};
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = corpus::periodic(256, |y| Complex64::from_polar(1.0, 2.0 * PI * y) + 0.25 * Complex64::from_polar(1.0, -6.0 * PI * y));
    for s in [0.0, 0.25, 0.5, 0.75] {
        println!("H^{s} torus norm^2: {:.6}", hs_torus(&u, s)?);
    }
    for s in [0.1, 0.25, 0.4] {
        let bn = bn_constants(s, 32)?;
        let ratio = torus_kernel_seminorm(&u, s)? / torus_fourier_seminorm(&u, s)?;
        println!("s = {s}: B_n in [{:.4}, {:.4}], kernel / Fourier = {ratio:.4}", bn.min, bn.max);
    }
    let grid = Grid::new(128, 9)?;
    let v = grid.sample(|y| Complex64::new((y - 0.5).abs(), 0.0));
    for s in [0.2, 0.4, 0.6] {
        println!("|y - 1/2|: H^{s}([0,1]) seminorm^2 {:.6}, W^{{{s},3}} seminorm^3 {:.6}", hs_interval(&v, s, &grid)?, wsp_interval(&v, s, 3.0, &grid)?);
    }
    let tr = traces(&grid.sample(|y| Complex64::new((PI * y).sin(), 0.0)), &grid);
    println!("traces of sin(pi y): u' = {:.6} / {:.6}", tr.du0.re, tr.du1.re);
    Ok(())
}

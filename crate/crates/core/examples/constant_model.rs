//! The constant-coefficient model: RK4 against the arctan closed form and
//! the uniform bound `exp(|c|π/(|k||d|))` on the multiplier.

use channel_damping::evolve::{constant_model_exact, constant_model_simulate, ConstantModelParams};
use channel_damping::experiment::constant_model_suite;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ConstantModelParams::new(Complex64::new(1.0, 0.5), 2.0, 1.0, 10.0)?;
    println!("bound on |multiplier|: {:.6}", p.log_bound().exp());
    for t in [1.0, 5.0, 10.0, 20.0, 50.0] {
        let exact = constant_model_exact(&p, t);
        let sim = constant_model_simulate(&p, t, 20_000);
        println!("t = {t:>4}: |m| = {:.8}, RK4 error {:.2e}", exact.norm(), (sim - exact).norm());
    }
    let suite = constant_model_suite(1, 2000);
    println!(
        "{} random draws: max relative error {:.2e}, max log|m| / bound {:.4}",
        suite.draws, suite.max_rel_error, suite.max_bound_ratio
    );
    Ok(())
}

//! Builds the coefficient pair `(f, g)` for the shipped flows and a
//! tabulated one, and prints their regularity report.

use channel_damping::profiles::{build_coefficients, validate_regularity, ShearProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ys: Vec<f64> = (0..=40).map(|j| j as f64 / 40.0).collect();
    let us: Vec<f64> = ys.iter().map(|y| y + 0.3 * y * y).collect();
    let flows = [
        ShearProfile::couette(),
        ShearProfile::quadratic(0.25)?,
        ShearProfile::tanh(2.0)?,
        ShearProfile::from_table(ys, us)?,
    ];
    for flow in &flows {
        let pair = build_coefficients(flow, 128)?;
        let report = validate_regularity(&pair, 2);
        println!(
            "{:<10} min g {:.4}  max |f| {:.4}  g^2 jump {:.4}  bounds f {:?}  flags {:?}",
            flow.name(),
            pair.min_abs_g(),
            pair.max_abs_f(),
            report.g2_jump,
            report.f_bounds.iter().map(|b| format!("{b:.3}")).collect::<Vec<_>>(),
            report.flags
        );
    }
    // a non-monotone profile is rejected
    match ShearProfile::named("quadratic", Some(-3.0)) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}

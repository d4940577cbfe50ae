//! Boundary-layer integrals `C_s(T, y) = ∫₁^T t^{s-1} e^{ikty} dt`, their
//! envelopes, the limit constants and the `L^p` membership of `y^{-s}`.

use channel_damping::asymptotics::{cs_integral, cs_limit_constant, envelope, lp_membership};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for y in [0.0, 1e-4, 1e-2, 0.5] {
        let r = cs_integral(1.0, y, 0.5, 1e4)?;
        println!(
            "s = 1/2, T = 1e4, y = {y:<6}: |C| = {:>9.4}, envelope {:>9.4}",
            r.value.norm(),
            envelope(0.5, 1.0, y, 1e4)
        );
    }
    for s in [0.25, 0.5, 0.75] {
        let c = cs_limit_constant(s)?;
        println!("limit constant s = {s}: {:.10} {:+.10}i", c.re, c.im);
    }
    for (s, p) in [(0.4, 2.0), (0.4, 3.0), (0.5, 2.0)] {
        println!("y^-{s} in L^{p}: {:?}", lp_membership(s, p)?.verdict);
    }
    Ok(())
}

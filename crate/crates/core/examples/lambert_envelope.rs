//! Lambert W branches and the envelope inverses of g(s) = s / f(s).

use gelfand::scalar::{critical_s0, lambert_w0, lambert_wm1, Nonlinearity};

fn main() -> gelfand::Result<()> {
    for x in [-0.3, -0.1, -0.01] {
        let (w0, wm1) = (lambert_w0(x)?, lambert_wm1(x)?);
        println!("W0({x}) = {w0:.12}   W-1({x}) = {wm1:.12}");
    }

    for f in [Nonlinearity::exp(), Nonlinearity::power(2.0)?, Nonlinearity::power(3.0)?] {
        let env = critical_s0(&f)?;
        println!("{}: s0 = {:.10}, sup g = {:.10}", f.name(), env.s0, env.lambda_cap);
        for t in [0.25, 0.5, 0.9] {
            let lam = t * env.lambda_cap;
            println!("  g = {lam:.6}: lower {:.8}, upper {:.8}", env.g1_inv(lam)?, env.g2_inv(lam)?);
        }
    }
    Ok(())
}

//! A uniform convolution kernel on an interval, discretized at two grid steps.

use gelfand::build_kernel_space;
use gelfand::scalar::Nonlinearity;
use gelfand::solver::{minimal_solve, MinimalOptions};
use gelfand::spectral::dirichlet_eigenpair;

fn main() -> gelfand::Result<()> {
    let kernel = |z: f64| if z.abs() <= 1.0 { 0.5 } else { 0.0 };
    let f = Nonlinearity::exp();
    for h in [0.1, 0.05, 0.025] {
        let k = build_kernel_space(kernel, 1.0, h, (-1.0, 1.0))?;
        let lam_m = dirichlet_eigenpair(&k.domain)?.value;
        let u = minimal_solve(&k.domain, &f, 0.05, &MinimalOptions::default())?
            .solution()
            .expect("0.05 is below lambda*");
        let mid = k.domain.omega().iter().position(|&v| k.nodes[v].abs() < 1e-9);
        println!(
            "h = {h:<6} |Omega| = {:3}  lambda_m = {lam_m:.6}  u(0) = {}",
            k.domain.n_interior(),
            mid.map_or("-".into(), |i| format!("{:.6}", u.values[i]))
        );
    }
    Ok(())
}

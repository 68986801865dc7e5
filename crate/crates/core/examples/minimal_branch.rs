//! The minimal solution of the exponential problem on the four-point path,
//! swept up to the extremal parameter and compared with -W0(-2 lambda).

use gelfand::branch::{sweep_minimal, SweepOptions};
use gelfand::corpus::builtin;
use gelfand::scalar::lambert_w0;

fn main() -> gelfand::Result<()> {
    let ex = builtin("path4-exp")?;
    let grid: Vec<f64> = (1..=18).map(|k| k as f64 * 0.01).collect();
    let branch = sweep_minimal(&ex.domain, &ex.f, &grid, &SweepOptions::default())?;
    println!("lambda,u,closed_form,mu1");
    for p in &branch.points {
        let exact = -lambert_w0(-2.0 * p.lambda)?;
        println!("{:.2},{:.12},{:.12},{:.6}", p.lambda, p.norm_inf, exact, p.mu1);
    }
    Ok(())
}

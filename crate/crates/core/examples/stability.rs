//! Every solution at one parameter, with its linearized stability and energy.

use gelfand::branch::{solution_lattice, LatticeOptions};
use gelfand::corpus::builtin;
use gelfand::solver::{energy, verify_solution};

fn main() -> gelfand::Result<()> {
    let ex = builtin("path4-exp")?;
    for lambda in [0.05, 0.1, 0.15] {
        println!("lambda = {lambda}");
        for s in solution_lattice(&ex.domain, &ex.f, lambda, &LatticeOptions::default())? {
            let report = verify_solution(&ex.domain, &ex.f, &s, 1e-10)?;
            println!(
                "  u = {:?}  mu1 = {:+.6}  stable = {}  energy = {:.6}  residual = {:.1e}",
                s.values.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
                s.mu1,
                s.stable,
                energy(&ex.domain, &ex.f, lambda, &ex.domain.extend_by_zero(&s.values))?,
                report.residual
            );
        }
    }
    Ok(())
}

//! Counting solutions on the four-point path: asymmetric pairs appear below
//! a threshold parameter.

use gelfand::branch::{count_threshold, solution_lattice, LatticeOptions};
use gelfand::corpus::builtin;

fn main() -> gelfand::Result<()> {
    let ex = builtin("path4-exp")?;
    let opts = LatticeOptions::default();
    for lambda in [0.02, 0.05, 0.07, 0.08, 0.12, 0.18] {
        let sols = solution_lattice(&ex.domain, &ex.f, lambda, &opts)?;
        println!("lambda {lambda:.2}: {} solutions", sols.len());
    }
    let hat = count_threshold(&ex.domain, &ex.f, (0.05, 0.1), 4, 1e-5, &opts)?;
    println!("four solutions up to lambda = {hat:.5}");
    Ok(())
}

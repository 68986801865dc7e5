//! Dirichlet ground state of a weighted path, computed two ways.

use gelfand::spectral::{dirichlet_eigenpair, lambda_via_moments};
use gelfand::{DirichletDomain, GraphBuilder};

fn main() -> gelfand::Result<()> {
    let mut b = GraphBuilder::new();
    b.edge("a", "x", 2.0).edge("x", "y", 3.0).edge("y", "b", 2.0);
    let g = b.build()?;
    let omega: Vec<usize> = ["x", "y"].iter().map(|l| g.labels().iter().position(|m| m == l).unwrap()).collect();
    let d = DirichletDomain::new(g, &omega)?;

    let e = dirichlet_eigenpair(&d)?;
    println!("lambda_m = {:.12}", e.value);
    for (label, v) in d.interior_labels().iter().zip(&e.vector) {
        println!("  phi({label}) = {v:.6}");
    }
    // a / (a + b) for this family
    println!("closed form = {:.12}", 2.0 / 5.0);

    for (n, est) in lambda_via_moments(&d, 8)?.iter().enumerate() {
        println!("moment estimate n={}: {est:.12}", n + 1);
    }
    Ok(())
}

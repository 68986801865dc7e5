//! Bifurcation diagram of the four-point path as CSV on stdout.

use gelfand::branch::{build_diagram, ContinuationOptions, DiagramOptions, LatticeOptions};
use gelfand::corpus::builtin;
use gelfand::io::{diagram_table, emit_csv};

fn main() -> gelfand::Result<()> {
    let ex = builtin("path4-exp")?;
    let opts = DiagramOptions {
        reference_lambda: 0.05,
        lattice: LatticeOptions::default(),
        continuation: ContinuationOptions { step: ex.step, ..Default::default() },
    };
    let diagram = build_diagram(&ex.domain, &ex.f, &opts)?;
    eprintln!("branches: {}", diagram.branch_names().join(", "));
    let (header, rows) = diagram_table(&diagram);
    emit_csv(&header, &rows, None, &mut std::io::stdout())
}

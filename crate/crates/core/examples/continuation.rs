//! Follow the minimal branch around its fold onto the unstable upper branch.

use gelfand::branch::{continue_branch, detect_fold, ContinuationOptions};
use gelfand::corpus::builtin;
use gelfand::solver::{minimal_solve, MinimalOptions};

fn main() -> gelfand::Result<()> {
    let ex = builtin("path4-exp")?;
    let start = minimal_solve(&ex.domain, &ex.f, 0.01, &MinimalOptions::default())?
        .solution()
        .expect("0.01 is below lambda*");
    let opts = ContinuationOptions { norm_cap: 8.0, ..Default::default() };
    let branch = continue_branch(&ex.domain, &ex.f, &start, &opts)?;

    for p in branch.points.iter().step_by(4) {
        println!("arc {:8.4}  lambda {:.8}  |u| {:.6}  stable {}", p.arc, p.lambda, p.norm_inf, p.stable());
    }
    for fold in detect_fold(&branch) {
        println!("fold at lambda {:.10} ({:?}), mu1 {:.2e}", fold.lambda, fold.kind, fold.mu1);
    }
    println!("stopped: {:?} after {} points", branch.stop, branch.points.len());
    Ok(())
}

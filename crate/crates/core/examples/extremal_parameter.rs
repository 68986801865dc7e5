//! Extremal parameter for a few graphs and nonlinearities.

use gelfand::branch::{lambda_star_bisect, lambda_star_bound, LambdaStarOptions};
use gelfand::corpus::builtin;

fn main() -> gelfand::Result<()> {
    let opts = LambdaStarOptions::default();
    for name in ["path4-exp", "path5-exp", "khat-n:a=1,b=2,c=0.5,n=5", "path4-power2", "path4-quartic", "path4-affine"] {
        let ex = builtin(name)?;
        let est = lambda_star_bisect(&ex.domain, &ex.f, &opts)?;
        let bound = lambda_star_bound(&ex.domain, &ex.f)?;
        let norm = est.u_star.as_ref().map_or("none".to_string(), |u| format!("{:.6}", u.norm_inf()));
        println!(
            "{name:<28} lambda* = {:.10}  bracket = ({:.10}, {:.10})  bound = {bound:.10}  |u*| = {norm}",
            est.lambda_star, est.bracket.0, est.bracket.1
        );
    }
    Ok(())
}

//! Command-line front end.
//!
//! ```text
//! gelfand <command> [--graph FILE | --builtin NAME] [--f SPEC] [--lambda V]
//!         [--from V --to V --points N] [--tol V] [--out FILE] [--parallel]
//! ```
//!
//! Exit status: 0 success, 1 usage, 2 bad input, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::branch::{
    assemble_diagram, build_diagram, continue_branch, detect_fold, find_jumps, lambda_star_bisect,
    solution_lattice, sweep_minimal, Branch, BranchLabel, ContinuationOptions, DiagramOptions,
    FoldKind, LambdaStarOptions, LatticeOptions, SweepOptions,
};
use crate::corpus::{builtin, run_checks, BuiltinExample, BUILTIN_NAMES};
use crate::error::{Error, Result};
use crate::io::{diagram_table, emit_csv, fmt_num, parse_nonlinearity, read_graph_file};
use crate::linalg::dist_inf;
use crate::rws::DirichletDomain;
use crate::scalar::Nonlinearity;
use crate::solver::{
    minimal_solve, minimal_solve_from, newton_solve, verify_solution, MinimalOptions,
    MinimalOutcome, NewtonOptions, NewtonOutcome, Solution, STAB_TOL,
};
use crate::spectral::dirichlet_eigenpair;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Solvers for Gelfand problems on weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "gelfand", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Graph file with `edge` and `omega` directives.
    #[arg(long, global = true, conflicts_with = "builtin")]
    graph: Option<PathBuf>,
    /// Built-in example, e.g. `path4-exp` or `khat-n:a=1,b=1,c=0,n=5`.
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// Nonlinearity: exp, power:P, affine, allen-cahn, log, poly:C0,C1,..., piecewise:FILE.
    #[arg(long = "f", global = true)]
    f: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    from: Option<f64>,
    #[arg(long, global = true)]
    to: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Bisection tolerance on the parameter.
    #[arg(long, global = true)]
    lambda_tol: Option<f64>,
    /// Threshold on mu1 above which a solution counts as stable.
    #[arg(long, global = true)]
    stab_tol: Option<f64>,
    /// Write CSV output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Solve sweep points independently and in parallel.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Principal Dirichlet eigenpair.
    Eig,
    /// One solution at --lambda.
    Solve {
        /// Comma-separated starting values on the interior.
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
        /// Damped Newton instead of the monotone iteration.
        #[arg(long)]
        newton: bool,
    },
    /// Minimal branch on an even grid from --from to --to.
    Sweep,
    /// Extremal parameter by bisection.
    LambdaStar,
    /// Pseudo-arclength continuation from the minimal solution.
    Continue {
        #[arg(long)]
        start_lambda: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        max_points: Option<usize>,
        /// `up` or `down` in the parameter.
        #[arg(long, default_value = "up")]
        direction: String,
        /// Stop at the first fold.
        #[arg(long)]
        stop_at_fold: bool,
    },
    /// Every branch through the solutions at a reference parameter.
    Diagram {
        #[arg(long)]
        reference_lambda: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Stability of every solution found at --lambda.
    Stability,
    /// Re-check every solution found at --lambda.
    Verify,
    /// Run a built-in example against its expected values (all when no name).
    Demo { name: Option<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Builtin(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub solve: f64,
    pub lambda: f64,
    pub stab: f64,
}

/// Everything a run needs, after argument parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph_source: Option<GraphSource>,
    pub nonlinearity: Option<String>,
    pub command: Command,
    pub lambda: Option<f64>,
    pub range: (Option<f64>, Option<f64>, Option<usize>),
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub parallel: bool,
}

impl RunConfig {
    fn from_cli(c: Cli) -> std::result::Result<Self, String> {
        let tolerances = Tolerances {
            solve: c.tol.unwrap_or(MinimalOptions::default().tol),
            lambda: c.lambda_tol.unwrap_or(LambdaStarOptions::default().tol_lambda),
            stab: c.stab_tol.unwrap_or(STAB_TOL),
        };
        for (name, v) in [
            ("--tol", tolerances.solve),
            ("--lambda-tol", tolerances.lambda),
            ("--stab-tol", tolerances.stab),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        let graph_source = match (c.graph, c.builtin) {
            (Some(p), None) => Some(GraphSource::File(p)),
            (None, Some(b)) => Some(GraphSource::Builtin(b)),
            (None, None) => None,
            (Some(_), Some(_)) => return Err("--graph and --builtin are exclusive".into()),
        };
        Ok(RunConfig {
            graph_source,
            nonlinearity: c.f,
            command: c.command,
            lambda: c.lambda,
            range: (c.from, c.to, c.points),
            tolerances,
            output: c.out,
            parallel: c.parallel,
        })
    }
}

/// Failure of a run, carrying its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(Error),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DivergedAt(_) => Failure::Numerical("diverged: lambda exceeds lambda_star".into()),
            Error::NotAdmissible(_)
            | Error::NotStrictlyConvex
            | Error::UnknownVertex(_)
            | Error::DimensionMismatch { .. }
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Nonlinearity(_) => Failure::Input(e),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

type RunResult = std::result::Result<i32, Failure>;

struct Problem {
    domain: DirichletDomain,
    f: Nonlinearity,
    example: Option<BuiltinExample>,
}

fn load(cfg: &RunConfig) -> std::result::Result<Problem, Failure> {
    let input = |e: Error| Failure::Input(e);
    let (domain, example) = match &cfg.graph_source {
        Some(GraphSource::File(p)) => (read_graph_file(p).and_then(|g| g.into_domain()).map_err(input)?, None),
        Some(GraphSource::Builtin(name)) => {
            let ex = builtin(name).map_err(input)?;
            (ex.domain.clone(), Some(ex))
        }
        None => return Err(Failure::Usage("one of --graph or --builtin is required".into())),
    };
    let f = match (&cfg.nonlinearity, &example) {
        (Some(spec), _) => parse_nonlinearity(spec).map_err(input)?,
        (None, Some(ex)) => ex.f.clone(),
        (None, None) => Nonlinearity::exp(),
    };
    Ok(Problem { domain, f, example })
}

fn require_lambda(cfg: &RunConfig) -> std::result::Result<f64, Failure> {
    match cfg.lambda {
        Some(l) if l.is_finite() && l >= 0.0 => Ok(l),
        Some(l) => Err(Failure::Usage(format!("--lambda must be finite and nonnegative, got {l}"))),
        None => Err(Failure::Usage("--lambda is required".into())),
    }
}

fn write_csv(cfg: &RunConfig, header: &[String], rows: &[Vec<String>], out: &mut dyn Write) -> Result<()> {
    emit_csv(header, rows, cfg.output.as_deref(), out)
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn minimal_opts(cfg: &RunConfig) -> MinimalOptions {
    MinimalOptions {
        tol: cfg.tolerances.solve,
        ..Default::default()
    }
}

fn newton_opts(cfg: &RunConfig) -> NewtonOptions {
    NewtonOptions {
        tol: cfg.tolerances.solve,
        ..Default::default()
    }
}

fn lattice_opts(cfg: &RunConfig) -> LatticeOptions {
    LatticeOptions {
        newton: newton_opts(cfg),
        ..Default::default()
    }
}

fn minimal_at(p: &Problem, cfg: &RunConfig, lambda: f64) -> std::result::Result<Solution, Failure> {
    match minimal_solve(&p.domain, &p.f, lambda, &minimal_opts(cfg))? {
        MinimalOutcome::Converged(s) => Ok(s),
        MinimalOutcome::Diverged { .. } => Err(Error::DivergedAt(lambda).into()),
    }
}

/// Parses and runs a command line, writing results to `out` and diagnostics
/// to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    run_config(&cfg, out, err)
}

/// Runs an already-parsed configuration.
pub fn run_config(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cfg, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(err, "{msg}");
            EXIT_NUMERICAL
        }
    }
}

fn dispatch(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> RunResult {
    if let Command::Demo { name } = &cfg.command {
        return demo(cfg, name.as_deref(), out);
    }
    let p = load(cfg)?;
    match &cfg.command {
        Command::Eig => eig(cfg, &p, out),
        Command::Solve { init, newton } => solve(cfg, &p, init.as_deref(), *newton, out),
        Command::Sweep => sweep(cfg, &p, out, err),
        Command::LambdaStar => lambda_star(cfg, &p, out),
        Command::Continue {
            start_lambda,
            step,
            max_points,
            direction,
            stop_at_fold,
        } => {
            let direction = match direction.as_str() {
                "up" | "+" | "1" => 1.0,
                "down" | "-" | "-1" => -1.0,
                other => return Err(Failure::Usage(format!("--direction must be up or down, got `{other}`"))),
            };
            let start = start_lambda
                .or(cfg.lambda)
                .ok_or_else(|| Failure::Usage("--start-lambda is required".into()))?;
            let defaults = ContinuationOptions::default();
            let opts = ContinuationOptions {
                direction,
                step: step.or(p.example.as_ref().map(|e| e.step)).unwrap_or(defaults.step),
                max_points: max_points.unwrap_or(defaults.max_points),
                stop_at_fold: *stop_at_fold,
                ..defaults
            };
            continuation(cfg, &p, start, &opts, out, err)
        }
        Command::Diagram { reference_lambda, step } => diagram(cfg, &p, *reference_lambda, *step, out),
        Command::Stability => stability(cfg, &p, out),
        Command::Verify => verify(cfg, &p, out),
        Command::Demo { .. } => unreachable!("handled above"),
    }
}

fn eig(cfg: &RunConfig, p: &Problem, out: &mut dyn Write) -> RunResult {
    let e = dirichlet_eigenpair(&p.domain)?;
    let mut rows = vec![
        vec!["lambda_m".to_string(), fmt_num(e.value)],
        vec!["alpha".to_string(), fmt_num(e.bounds.0)],
        vec!["M".to_string(), fmt_num(e.bounds.1)],
    ];
    for (l, v) in p.domain.interior_labels().iter().zip(&e.vector) {
        rows.push(vec![format!("phi_{l}"), fmt_num(*v)]);
    }
    write_csv(cfg, &strings(&["key", "value"]), &rows, out)?;
    Ok(0)
}

fn parse_init(text: &str, n: usize) -> std::result::Result<Vec<f64>, Failure> {
    let vals = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("--init value `{t}` is not a number")))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match vals.len() {
        1 => Ok(vec![vals[0]; n]),
        m if m == n => Ok(vals),
        m => Err(Failure::Input(Error::DimensionMismatch { expected: n, found: m })),
    }
}

fn solve(cfg: &RunConfig, p: &Problem, init: Option<&str>, newton: bool, out: &mut dyn Write) -> RunResult {
    let lambda = require_lambda(cfg)?;
    let n = p.domain.n_interior();
    let start = match init {
        Some(t) => parse_init(t, n)?,
        None => vec![0.0; n],
    };
    let sol = if newton {
        match newton_solve(&p.domain, &p.f, lambda, &start, &newton_opts(cfg))? {
            NewtonOutcome::Converged(s) => s,
            NewtonOutcome::NoConvergence {
                residual,
                iterations,
                fold,
                ..
            } => {
                let hint = if fold { " (singular Jacobian, near a fold)" } else { "" };
                return Err(Failure::Numerical(format!(
                    "newton did not converge after {iterations} iterations, residual {residual:e}{hint}"
                )));
            }
        }
    } else {
        match minimal_solve_from(&p.domain, &p.f, lambda, start, &minimal_opts(cfg))? {
            MinimalOutcome::Converged(s) => s,
            MinimalOutcome::Diverged { .. } => return Err(Error::DivergedAt(lambda).into()),
        }
    };
    let rows: Vec<Vec<String>> = p
        .domain
        .interior_labels()
        .into_iter()
        .zip(&sol.values)
        .map(|(l, v)| vec![l, fmt_num(*v)])
        .collect();
    write_csv(cfg, &strings(&["vertex", "value"]), &rows, out)?;
    writeln!(
        out,
        "{{\"lambda\": {}, \"residual\": {}, \"mu1\": {}, \"stable\": {}, \"minimal\": {}}}",
        fmt_num(sol.lambda),
        fmt_num(sol.residual),
        fmt_num(sol.mu1),
        sol.mu1 > cfg.tolerances.stab,
        sol.minimal
    )
    .map_err(Error::from)?;
    Ok(0)
}

fn sweep(cfg: &RunConfig, p: &Problem, out: &mut dyn Write, err: &mut dyn Write) -> RunResult {
    let (from, to, points) = match cfg.range {
        (Some(a), Some(b), Some(n)) => (a, b, n),
        _ => return Err(Failure::Usage("sweep needs --from, --to and --points".into())),
    };
    if points < 2 || !(to > from) || from < 0.0 {
        return Err(Failure::Usage("sweep needs 0 <= --from < --to and --points >= 2".into()));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
        .collect();
    let opts = SweepOptions {
        warm_start: !cfg.parallel,
        parallel: cfg.parallel,
        solve: minimal_opts(cfg),
    };
    let branch = sweep_minimal(&p.domain, &p.f, &grid, &opts)?;
    let scale = branch.points.iter().map(|q| q.norm_inf).fold(1.0, f64::max);
    for j in find_jumps(&branch, 0.1 * scale) {
        let _ = writeln!(
            err,
            "jump between lambda {} and {}: norm {} -> {}",
            fmt_num(j.lambda_before),
            fmt_num(j.lambda_after),
            fmt_num(j.norm_before),
            fmt_num(j.norm_after)
        );
    }
    let d = assemble_diagram(p.domain.interior_labels(), &[branch]);
    let (h, rows) = diagram_table(&d);
    write_csv(cfg, &h, &rows, out)?;
    Ok(0)
}

fn lambda_star(cfg: &RunConfig, p: &Problem, out: &mut dyn Write) -> RunResult {
    let opts = LambdaStarOptions {
        tol_lambda: cfg.tolerances.lambda,
        solve: minimal_opts(cfg),
    };
    let est = match lambda_star_bisect(&p.domain, &p.f, &opts) {
        Err(Error::Unbounded) => {
            write_csv(cfg, &strings(&["key", "value"]), &[strings(&["lambda_star", "inf"])], out)?;
            return Ok(0);
        }
        r => r?,
    };
    let mut rows = vec![
        vec!["lambda_star".to_string(), fmt_num(est.lambda_star)],
        vec!["bracket_lo".to_string(), fmt_num(est.bracket.0)],
        vec!["bracket_hi".to_string(), fmt_num(est.bracket.1)],
    ];
    if let Some(l) = est.refined_lambda {
        rows.push(vec!["refined_lambda".into(), fmt_num(l)]);
    }
    if let Some(u) = &est.u_star {
        rows.push(vec!["norm_inf".into(), fmt_num(u.norm_inf())]);
        rows.push(vec!["mu1".into(), fmt_num(u.mu1)]);
        for (l, v) in p.domain.interior_labels().iter().zip(&u.values) {
            rows.push(vec![format!("u_{l}"), fmt_num(*v)]);
        }
    }
    write_csv(cfg, &strings(&["key", "value"]), &rows, out)?;
    Ok(0)
}

fn report_folds(b: &Branch, err: &mut dyn Write) {
    for fold in detect_fold(b) {
        let kind = match fold.kind {
            FoldKind::Turning => "turning".to_string(),
            FoldKind::Degenerate { norm_range, .. } => {
                format!("flat, norm {}..{}", fmt_num(norm_range.0), fmt_num(norm_range.1))
            }
        };
        let _ = writeln!(
            err,
            "fold at lambda {} ({kind}), mu1 {}",
            fmt_num(fold.lambda),
            fmt_num(fold.mu1)
        );
    }
}

fn continuation(
    cfg: &RunConfig,
    p: &Problem,
    start: f64,
    opts: &ContinuationOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> RunResult {
    let sol = minimal_at(p, cfg, start)?;
    let mut b = continue_branch(&p.domain, &p.f, &sol, opts)?;
    b.label = BranchLabel::Minimal;
    report_folds(&b, err);
    let _ = writeln!(err, "stopped: {:?} after {} points", b.stop, b.points.len());
    let d = assemble_diagram(p.domain.interior_labels(), &[b]);
    let (h, rows) = diagram_table(&d);
    write_csv(cfg, &h, &rows, out)?;
    Ok(0)
}

fn diagram(cfg: &RunConfig, p: &Problem, reference: Option<f64>, step: Option<f64>, out: &mut dyn Write) -> RunResult {
    let reference = match reference.or(cfg.lambda).or(p.example.as_ref().map(|e| e.reference_lambda)) {
        Some(r) => r,
        None => 0.5 * lambda_star_bisect(&p.domain, &p.f, &LambdaStarOptions::default())?.lambda_star,
    };
    let defaults = ContinuationOptions::default();
    let opts = DiagramOptions {
        reference_lambda: reference,
        lattice: lattice_opts(cfg),
        continuation: ContinuationOptions {
            step: step.or(p.example.as_ref().map(|e| e.step)).unwrap_or(defaults.step),
            ..defaults
        },
    };
    let d = build_diagram(&p.domain, &p.f, &opts)?;
    let (h, rows) = diagram_table(&d);
    write_csv(cfg, &h, &rows, out)?;
    Ok(0)
}

fn stability(cfg: &RunConfig, p: &Problem, out: &mut dyn Write) -> RunResult {
    let lambda = require_lambda(cfg)?;
    let sols = solution_lattice(&p.domain, &p.f, lambda, &lattice_opts(cfg))?;
    let labels = crate::branch::norm_order_labels(sols.len());
    let mut header = strings(&["solution", "norm_inf", "mu1", "stable"]);
    header.extend(p.domain.interior_labels().iter().map(|l| format!("u_{l}")));
    let rows: Vec<Vec<String>> = sols
        .iter()
        .zip(&labels)
        .map(|(s, l)| {
            let mut r = vec![
                l.to_string(),
                fmt_num(s.norm_inf()),
                fmt_num(s.mu1),
                (s.mu1 > cfg.tolerances.stab).to_string(),
            ];
            r.extend(s.values.iter().map(|&v| fmt_num(v)));
            r
        })
        .collect();
    write_csv(cfg, &header, &rows, out)?;
    Ok(0)
}

fn verify(cfg: &RunConfig, p: &Problem, out: &mut dyn Write) -> RunResult {
    let lambda = require_lambda(cfg)?;
    let mut sols = solution_lattice(&p.domain, &p.f, lambda, &lattice_opts(cfg))?;
    if p.f.is_admissible() {
        if let Some(m) = minimal_solve(&p.domain, &p.f, lambda, &minimal_opts(cfg))?.solution() {
            sols.retain(|s| dist_inf(&s.values, &m.values) > LatticeOptions::default().dedup_tol);
            sols.insert(0, m);
        }
    }
    let tol = cfg.tolerances.solve.max(1e-10);
    let header = strings(&["solution", "norm_inf", "residual", "mu1", "envelope", "passed", "violations"]);
    let mut rows = Vec::new();
    let mut all = true;
    for (i, s) in sols.iter().enumerate() {
        let rep = verify_solution(&p.domain, &p.f, s, tol)?;
        all &= rep.passed();
        rows.push(vec![
            if s.minimal { "minimal".to_string() } else { format!("newton{i}") },
            fmt_num(s.norm_inf()),
            fmt_num(rep.residual),
            fmt_num(rep.mu1),
            rep.within_envelope.map_or("n/a".into(), |b| b.to_string()),
            rep.passed().to_string(),
            rep.violations.join("; "),
        ]);
    }
    write_csv(cfg, &header, &rows, out)?;
    Ok(if all { 0 } else { EXIT_NUMERICAL })
}

fn demo(cfg: &RunConfig, name: Option<&str>, out: &mut dyn Write) -> RunResult {
    let names: Vec<String> = match (name, &cfg.graph_source) {
        (Some(n), _) => vec![n.to_string()],
        (None, Some(GraphSource::Builtin(n))) => vec![n.clone()],
        (None, Some(GraphSource::File(_))) => {
            return Err(Failure::Usage("demo runs built-in examples only".into()));
        }
        (None, None) => BUILTIN_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let examples = names
        .iter()
        .map(|n| builtin(n))
        .collect::<Result<Vec<_>>>()
        .map_err(Failure::Input)?;
    let header = strings(&["example", "quantity", "expected", "computed", "tol", "provenance", "status"]);
    let mut rows = Vec::new();
    let mut all = true;
    for ex in &examples {
        for r in run_checks(ex) {
            let ok = r.passed();
            all &= ok;
            let e = &r.expectation;
            rows.push(vec![
                ex.name.clone(),
                e.quantity.to_string(),
                fmt_num(e.value),
                match &r.computed {
                    Ok(v) => fmt_num(*v),
                    Err(err) => format!("error: {err}"),
                },
                fmt_num(e.tol),
                e.provenance.to_string(),
                if ok { "PASS" } else { "FAIL" }.to_string(),
            ]);
        }
    }
    write_csv(cfg, &header, &rows, out)?;
    Ok(if all { 0 } else { EXIT_NUMERICAL })
}

/// Convenience for tests and the binary: run with string arguments.
pub fn run_strs(args: &[&str], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run(std::iter::once("gelfand").chain(args.iter().copied()), out, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run_strs(args, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn eig_on_builtin() {
        let (code, out, _) = call(&["eig", "--builtin", "path4-exp"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("key,value\nlambda_m,0.5"), "{out}");
        assert!(out.contains("phi_2,1\n"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, 0);
        assert_eq!(call(&["eig"]).0, EXIT_USAGE);
        assert_eq!(call(&["eig", "--builtin", "nope"]).0, EXIT_INPUT);
        assert_eq!(call(&["solve", "--builtin", "path4-exp", "--tol", "-1", "--lambda", "0.1"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["solve", "--builtin", "path4-exp", "--lambda", "0.3"]);
        assert_eq!(code, EXIT_NUMERICAL);
        assert!(err.contains("diverged: lambda exceeds lambda_star"));
    }

    #[test]
    fn solve_prints_csv_and_summary() {
        let (code, out, _) = call(&["solve", "--builtin", "path4-exp", "--lambda", "0.1"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "vertex,value");
        assert!(lines[1].starts_with("2,0.2591711018"));
        assert!(lines[3].contains("\"minimal\": true") && lines[3].contains("\"stable\": true"));
    }

    #[test]
    fn newton_from_high_start_finds_upper_solution() {
        let (code, out, _) = call(&["solve", "--builtin", "path4-exp", "--lambda", "0.1", "--newton", "--init", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("2,2.54264135777"), "{out}");
        assert!(out.contains("\"stable\": false"));
    }
}

//! Parameter-space machinery: the extremal parameter, sweeps of the minimal
//! branch, pseudo-arclength continuation through folds, and diagrams.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dist_inf, dot, norm_inf, Lu, Matrix};
use crate::rws::DirichletDomain;
use crate::scalar::{critical_s0, sup_g, Nonlinearity};
use crate::solver::{
    jacobian, minimal_solve, minimal_solve_from, newton_solve, residual, MinimalOptions,
    MinimalOutcome, NewtonOptions, NewtonOutcome, Solution, STAB_TOL,
};
use crate::spectral::dirichlet_eigenpair;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchLabel {
    Minimal,
    Upper,
    Other(String),
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchLabel::Minimal => f.write_str("minimal"),
            BranchLabel::Upper => f.write_str("upper"),
            BranchLabel::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub lambda: f64,
    pub values: Vec<f64>,
    pub norm_inf: f64,
    pub mu1: f64,
    /// Cumulative distance in `(u, lambda)` from the first point.
    pub arc: f64,
    pub residual: f64,
}

impl BranchPoint {
    pub fn from_solution(sol: &Solution, arc: f64) -> Self {
        BranchPoint {
            lambda: sol.lambda,
            values: sol.values.clone(),
            norm_inf: sol.norm_inf(),
            mu1: sol.mu1,
            arc,
            residual: sol.residual,
        }
    }

    pub fn stable(&self) -> bool {
        self.mu1 >= -STAB_TOL
    }

    fn distance(&self, other: &BranchPoint) -> f64 {
        let du: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (du + (self.lambda - other.lambda).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Sweep finished its grid.
    GridExhausted,
    MaxPoints,
    LambdaNonPositive,
    NormCap,
    /// Requested stop at the first fold.
    Fold,
    /// Step size fell below the minimum.
    StepTooSmall,
    /// The bordered system became singular.
    SingularBordered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: BranchLabel,
    pub points: Vec<BranchPoint>,
    /// Indices of points where `lambda` turns from increasing to decreasing.
    pub folds: Vec<usize>,
    pub stop: StopReason,
}

impl Branch {
    fn push(&mut self, d: &DirichletDomain, f: &Nonlinearity, lambda: f64, values: Vec<f64>) -> Result<()> {
        let sol = Solution::new(d, f, lambda, values, false)?;
        let arc = match self.points.last() {
            None => 0.0,
            Some(prev) => {
                let p = BranchPoint::from_solution(&sol, 0.0);
                prev.arc + prev.distance(&p)
            }
        };
        self.points.push(BranchPoint::from_solution(&sol, arc));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaStarOptions {
    pub tol_lambda: f64,
    pub solve: MinimalOptions,
}

impl Default for LambdaStarOptions {
    fn default() -> Self {
        LambdaStarOptions {
            tol_lambda: 1e-7,
            solve: MinimalOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalEstimate {
    /// Midpoint of the final bracket.
    pub lambda_star: f64,
    /// `(solvable, not solvable)`.
    pub bracket: (f64, f64),
    /// The extremal solution, absent when none exists.
    pub u_star: Option<Solution>,
    /// Fold location from the extended system, when it converged.
    pub refined_lambda: Option<f64>,
}

/// Upper bound `lambda_m * sup s/f(s)` for the extremal parameter.
pub fn lambda_star_bound(d: &DirichletDomain, f: &Nonlinearity) -> Result<f64> {
    let lam_m = dirichlet_eigenpair(d)?.value;
    Ok(lam_m * sup_g(f)?.value)
}

/// Bisection for the extremal parameter with the monotone iteration as the
/// solvability test.
pub fn lambda_star_bisect(
    d: &DirichletDomain,
    f: &Nonlinearity,
    opts: &LambdaStarOptions,
) -> Result<ExtremalEstimate> {
    if !f.is_admissible() {
        return Err(Error::NotAdmissible(f.name()));
    }
    if !(opts.tol_lambda > 0.0) {
        return Err(Error::OutOfDomain {
            what: "lambda tolerance",
            value: opts.tol_lambda,
        });
    }
    let upper = lambda_star_bound(d, f)?;
    if f.is_affine() {
        // linear problem: solvable exactly below lambda_m / slope, never at it
        return Ok(ExtremalEstimate {
            lambda_star: upper,
            bracket: (upper, upper),
            u_star: None,
            refined_lambda: None,
        });
    }
    if let MinimalOutcome::Converged(sol) = minimal_solve(d, f, upper, &opts.solve)? {
        return Ok(ExtremalEstimate {
            lambda_star: upper,
            bracket: (upper, upper),
            u_star: Some(sol),
            refined_lambda: None,
        });
    }
    let (mut lo, mut hi) = (0.0, upper);
    let mut lo_sol = vec![0.0; d.n_interior()];
    while hi - lo > opts.tol_lambda {
        let mid = 0.5 * (lo + hi);
        let levels_left = ((hi - lo) / opts.tol_lambda).log2().ceil();
        let mut solve = opts.solve;
        if levels_left <= 3.0 {
            solve.max_iter *= 10;
        }
        match minimal_solve_from(d, f, mid, lo_sol.clone(), &solve)? {
            MinimalOutcome::Converged(sol) => {
                if sol.values.iter().zip(&lo_sol).any(|(a, b)| *a < b - 1e-9) {
                    return Err(Error::NonMonotonePredicate(mid));
                }
                lo = mid;
                lo_sol = sol.values;
            }
            MinimalOutcome::Diverged { .. } => hi = mid,
        }
    }
    let lambda_star = 0.5 * (lo + hi);
    let refined = if lo > 0.0 {
        refine_fold(d, f, lo, &lo_sol)?
    } else {
        None
    };
    let accept = |lam: f64| lam >= lo - 10.0 * opts.tol_lambda && lam <= hi + 10.0 * opts.tol_lambda;
    let (u_star, refined_lambda) = match refined {
        Some((lam, u)) if accept(lam) => (Some(Solution::new(d, f, lam, u, true)?), Some(lam)),
        _ => {
            let mut solve = opts.solve;
            solve.max_iter *= 10;
            let sol = minimal_solve_from(d, f, lambda_star, lo_sol, &solve)?.solution();
            (sol, None)
        }
    };
    Ok(ExtremalEstimate {
        lambda_star,
        bracket: (lo, hi),
        u_star,
        refined_lambda,
    })
}

/// Newton on the extended fold system `F = 0, F_u v = 0, l.v = 1`, started
/// from a solution `u0` at `lambda0` close to the fold.
pub fn refine_fold(
    d: &DirichletDomain,
    f: &Nonlinearity,
    lambda0: f64,
    u0: &[f64],
) -> Result<Option<(f64, Vec<f64>)>> {
    let n = d.n_interior();
    // right null-vector guess: lowest mode of F_u, mapped back from the
    // symmetric form
    let nu = d.nu_omega();
    let mut s = d.symmetric_operator();
    for i in 0..n {
        s[(i, i)] -= lambda0 * f.slope(u0[i]);
    }
    let eig = crate::linalg::symmetric_eigen(&s)?;
    let mut v: Vec<f64> = eig.vector(0).iter().zip(nu).map(|(p, w)| p / w.sqrt()).collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let vv = dot(&v, &v);
    let ell: Vec<f64> = v.iter().map(|x| x / vv).collect();
    let mut u = u0.to_vec();
    let mut lam = lambda0;
    let size = 2 * n + 1;
    for _ in 0..60 {
        let fu = jacobian(d, f, lam, &u);
        let r1 = residual(d, f, lam, &u);
        let r2 = fu.mul_vec(&v);
        let r3 = dot(&ell, &v) - 1.0;
        let scale = norm_inf(&u).max(1.0);
        let rn = norm_inf(&r1).max(norm_inf(&r2)).max(r3.abs());
        if rn <= 1e-13 * scale {
            return Ok(Some((lam, u)));
        }
        let mut j = Matrix::zeros(size, size);
        for a in 0..n {
            for b in 0..n {
                j[(a, b)] = fu[(a, b)];
                j[(n + a, n + b)] = fu[(a, b)];
            }
            let (fv, fd, fdd) = f.eval_ext(u[a]);
            j[(a, 2 * n)] = -fv;
            j[(n + a, a)] = -lam * fdd * v[a];
            j[(n + a, 2 * n)] = -fd * v[a];
            j[(2 * n, n + a)] = ell[a];
        }
        let rhs: Vec<f64> = r1.iter().chain(&r2).chain(std::iter::once(&r3)).map(|x| -x).collect();
        let step = match Lu::factor(&j).and_then(|lu| lu.solve(&rhs)) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        for a in 0..n {
            u[a] += step[a];
            v[a] += step[n + a];
        }
        lam += step[2 * n];
        if !lam.is_finite() || u.iter().any(|x| !x.is_finite()) || norm_inf(&u) > 1e8 {
            return Ok(None);
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Start each solve from the previous solution (the default). When off,
    /// every point is solved from zero, in parallel if requested.
    pub warm_start: bool,
    pub parallel: bool,
    pub solve: MinimalOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            warm_start: true,
            parallel: false,
            solve: MinimalOptions::default(),
        }
    }
}

/// Minimal solutions along an ascending parameter grid.
pub fn sweep_minimal(
    d: &DirichletDomain,
    f: &Nonlinearity,
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<Branch> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::OutOfDomain {
            what: "sweep grid (must be strictly ascending)",
            value: grid.windows(2).find(|w| !(w[1] > w[0])).map_or(f64::NAN, |w| w[1]),
        });
    }
    let sols: Vec<Solution> = if opts.warm_start {
        let mut out = Vec::with_capacity(grid.len());
        let mut start = vec![0.0; d.n_interior()];
        for &lam in grid {
            match minimal_solve_from(d, f, lam, start.clone(), &opts.solve)? {
                MinimalOutcome::Converged(s) => {
                    start = s.values.clone();
                    out.push(s);
                }
                MinimalOutcome::Diverged { .. } => return Err(Error::DivergedAt(lam)),
            }
        }
        out
    } else {
        let solve_one = |&lam: &f64| -> Result<Solution> {
            minimal_solve(d, f, lam, &opts.solve)?
                .solution()
                .ok_or(Error::DivergedAt(lam))
        };
        if opts.parallel {
            grid.par_iter().map(solve_one).collect::<Result<Vec<_>>>()?
        } else {
            grid.iter().map(solve_one).collect::<Result<Vec<_>>>()?
        }
    };
    let mut branch = Branch {
        label: BranchLabel::Minimal,
        points: Vec::with_capacity(sols.len()),
        folds: Vec::new(),
        stop: StopReason::GridExhausted,
    };
    for s in &sols {
        let arc = match branch.points.last() {
            None => 0.0,
            Some(prev) => prev.arc + prev.distance(&BranchPoint::from_solution(s, 0.0)),
        };
        branch.points.push(BranchPoint::from_solution(s, arc));
    }
    Ok(branch)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// `+1` starts toward increasing parameter, `-1` toward decreasing.
    pub direction: f64,
    /// Initial and maximal arclength step.
    pub step: f64,
    pub min_step: f64,
    pub max_points: usize,
    pub norm_cap: f64,
    /// Corrector tolerance, relative to `max(1, ||u||_inf)`.
    pub tol: f64,
    pub stop_at_fold: bool,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            direction: 1.0,
            step: 0.05,
            min_step: 1e-6,
            max_points: 5000,
            norm_cap: 50.0,
            tol: 1e-11,
            stop_at_fold: false,
        }
    }
}

const TANGENT_DEADBAND: f64 = 1e-12;
const MAX_CORRECTOR_ITERS: usize = 8;

struct Tracer<'a> {
    d: &'a DirichletDomain,
    f: &'a Nonlinearity,
    tol: f64,
}

impl Tracer<'_> {
    fn n(&self) -> usize {
        self.d.n_interior()
    }

    /// `[[F_u, F_lambda], [t^T]]` at `y = (u, lambda)`.
    fn bordered(&self, y: &[f64], t: &[f64]) -> Matrix {
        let n = self.n();
        let (u, lam) = (&y[..n], y[n]);
        let fu = jacobian(self.d, self.f, lam, u);
        Matrix::from_fn(n + 1, n + 1, |a, b| {
            if a == n {
                t[b]
            } else if b == n {
                -self.f.value(u[a])
            } else {
                fu[(a, b)]
            }
        })
    }

    /// Newton on `F = 0` restricted to the hyperplane through `pred` normal to `t`.
    fn correct(&self, pred: &[f64], t: &[f64]) -> Option<(Vec<f64>, usize)> {
        let n = self.n();
        let mut y = pred.to_vec();
        for it in 0..=MAX_CORRECTOR_ITERS {
            let r = residual(self.d, self.f, y[n], &y[..n]);
            let g: f64 = (0..=n).map(|k| t[k] * (y[k] - pred[k])).sum();
            let scale = norm_inf(&y[..n]).max(1.0);
            if norm_inf(&r) <= self.tol * scale && g.abs() <= self.tol * scale {
                return Some((y, it));
            }
            if it == MAX_CORRECTOR_ITERS {
                break;
            }
            let rhs: Vec<f64> = r.iter().chain(std::iter::once(&g)).map(|x| -x).collect();
            let step = Lu::factor(&self.bordered(&y, t)).and_then(|lu| lu.solve(&rhs)).ok()?;
            for k in 0..=n {
                y[k] += step[k];
            }
            if y.iter().any(|v| !v.is_finite()) {
                return None;
            }
        }
        None
    }

    /// Unit tangent at `y`, oriented along `t_old`.
    fn tangent(&self, y: &[f64], t_old: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let mut rhs = vec![0.0; n + 1];
        rhs[n] = 1.0;
        let t = Lu::factor(&self.bordered(y, t_old))?.solve(&rhs)?;
        let norm = dot(&t, &t).sqrt();
        Ok(t.into_iter().map(|x| x / norm).collect())
    }

    /// Initial tangent from `F_u du = f(u)`, scaled so the parameter moves in `direction`.
    fn initial_tangent(&self, y: &[f64], direction: f64) -> Result<Vec<f64>> {
        let n = self.n();
        let (u, lam) = (&y[..n], y[n]);
        let rhs: Vec<f64> = u.iter().map(|&s| self.f.value(s)).collect();
        let du = Lu::factor(&jacobian(self.d, self.f, lam, u))?.solve(&rhs)?;
        let mut t: Vec<f64> = du;
        t.push(1.0);
        let norm = dot(&t, &t).sqrt() * direction.signum();
        Ok(t.into_iter().map(|x| x / norm).collect())
    }

    /// Point on the branch where the tangent's parameter component vanishes,
    /// between `y0` (positive component) and the point reached with step `h`.
    fn locate_fold(&self, y0: &[f64], t0: &[f64], h: f64, phi_h: f64) -> Option<Vec<f64>> {
        let n = self.n();
        let eval = |s: f64| -> Option<(Vec<f64>, f64)> {
            let pred: Vec<f64> = y0.iter().zip(t0).map(|(a, b)| a + s * b).collect();
            let (y, _) = self.correct(&pred, t0)?;
            let t = self.tangent(&y, t0).ok()?;
            Some((y, t[n]))
        };
        let (mut a, mut fa) = (0.0, t0[n]);
        let (mut b, mut fb) = (h, phi_h);
        let mut side = 0i8;
        let mut best: Option<Vec<f64>> = None;
        for _ in 0..80 {
            let c = (a * fb - b * fa) / (fb - fa);
            let (y, fc) = eval(c)?;
            if fc.abs() <= 1e-11 {
                return Some(y);
            }
            best = Some(y);
            if fc > 0.0 {
                a = c;
                fa = fc;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            } else {
                b = c;
                fb = fc;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            }
            if b - a <= 1e-15 * h {
                break;
            }
        }
        best
    }
}

/// Pseudo-arclength continuation from a solution.
pub fn continue_branch(
    d: &DirichletDomain,
    f: &Nonlinearity,
    start: &Solution,
    opts: &ContinuationOptions,
) -> Result<Branch> {
    let n = d.n_interior();
    let tracer = Tracer { d, f, tol: opts.tol };
    let mut branch = Branch {
        label: if start.minimal {
            BranchLabel::Minimal
        } else {
            BranchLabel::Other("continued".into())
        },
        points: Vec::new(),
        folds: Vec::new(),
        stop: StopReason::MaxPoints,
    };
    let mut y: Vec<f64> = start.values.clone();
    y.push(start.lambda);
    branch.push(d, f, start.lambda, start.values.clone())?;
    let mut t = match tracer.initial_tangent(&y, opts.direction) {
        Ok(t) => t,
        Err(_) => {
            branch.stop = StopReason::SingularBordered;
            return Ok(branch);
        }
    };
    let mut h = opts.step;
    let mut last_sign = if t[n] > TANGENT_DEADBAND {
        1
    } else if t[n] < -TANGENT_DEADBAND {
        -1
    } else {
        0
    };
    let mut plateau_start: Option<usize> = None;

    while branch.points.len() < opts.max_points {
        let pred: Vec<f64> = y.iter().zip(&t).map(|(a, b)| a + h * b).collect();
        let accepted = tracer.correct(&pred, &t).and_then(|(y_new, its)| {
            let t_new = tracer.tangent(&y_new, &t).ok()?;
            (dot(&t_new, &t) >= 0.9).then_some((y_new, t_new, its))
        });
        let Some((y_new, t_new, its)) = accepted else {
            h *= 0.5;
            if h < opts.min_step {
                branch.stop = StopReason::StepTooSmall;
                return Ok(branch);
            }
            continue;
        };

        let sign = if t_new[n] > TANGENT_DEADBAND {
            1
        } else if t_new[n] < -TANGENT_DEADBAND {
            -1
        } else {
            0
        };
        let mut fold_here = false;
        if last_sign == 1 && sign == -1 {
            if t[n] > TANGENT_DEADBAND {
                if let Some(yf) = tracer.locate_fold(&y, &t, h, t_new[n]) {
                    branch.push(d, f, yf[n], yf[..n].to_vec())?;
                    branch.folds.push(branch.points.len() - 1);
                }
            } else if let Some(i) = plateau_start {
                branch.folds.push(i);
            }
            fold_here = true;
        }
        if sign == 0 && last_sign == 1 && plateau_start.is_none() {
            plateau_start = Some(branch.points.len());
        }
        if sign != 0 {
            last_sign = sign;
            plateau_start = None;
        }
        if fold_here && opts.stop_at_fold {
            branch.stop = StopReason::Fold;
            return Ok(branch);
        }

        if y_new[n] <= 0.0 {
            branch.stop = StopReason::LambdaNonPositive;
            return Ok(branch);
        }
        branch.push(d, f, y_new[n], y_new[..n].to_vec())?;
        y = y_new;
        t = t_new;
        if norm_inf(&y[..n]) > opts.norm_cap {
            branch.stop = StopReason::NormCap;
            return Ok(branch);
        }
        if its <= 3 {
            h = (h * 1.3).min(opts.step);
        }
        h = h.clamp(opts.min_step, opts.step);
    }
    branch.stop = StopReason::MaxPoints;
    Ok(branch)
}

/// The solution at `lambda` on the part of `b` past its first fold.
///
/// Brackets `lambda` between consecutive points after the fold, interpolates
/// and polishes with Newton. `None` when the branch never returns to `lambda`.
pub fn point_past_fold(
    d: &DirichletDomain,
    f: &Nonlinearity,
    b: &Branch,
    lambda: f64,
) -> Result<Option<Solution>> {
    let Some(&fold) = b.folds.first() else {
        return Ok(None);
    };
    for w in b.points[fold..].windows(2) {
        let (p, q) = (&w[0], &w[1]);
        if (p.lambda - lambda) * (q.lambda - lambda) > 0.0 || p.lambda == q.lambda {
            continue;
        }
        let t = (lambda - p.lambda) / (q.lambda - p.lambda);
        let init: Vec<f64> = p
            .values
            .iter()
            .zip(&q.values)
            .map(|(a, c)| a + t * (c - a))
            .collect();
        if let NewtonOutcome::Converged(s) = newton_solve(d, f, lambda, &init, &NewtonOptions::default())? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FoldKind {
    /// Isolated turning point.
    Turning,
    /// A run of points at (numerically) constant maximal parameter.
    Degenerate { norm_range: (f64, f64), indices: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub index: usize,
    pub lambda: f64,
    pub values: Vec<f64>,
    pub mu1: f64,
    pub kind: FoldKind,
}

/// Parameter tolerance for recognizing a flat run of points.
pub const PLATEAU_TOL: f64 = 1e-8;

/// Local maxima of the parameter along a branch: flagged folds, interior
/// local maxima, and flat runs at a local maximum.
pub fn detect_fold(b: &Branch) -> Vec<Fold> {
    let pts = &b.points;
    let mut out: Vec<Fold> = Vec::new();
    if pts.len() < 3 {
        return out;
    }
    let mut i = 1;
    while i + 1 < pts.len() {
        let lam = pts[i].lambda;
        // extend a run of points at the same parameter
        let mut j = i;
        while j + 1 < pts.len() && (pts[j + 1].lambda - lam).abs() <= PLATEAU_TOL {
            j += 1;
        }
        let mut k = i;
        while k > 0 && (pts[k - 1].lambda - lam).abs() <= PLATEAU_TOL {
            k -= 1;
        }
        let before = if k > 0 { pts[k - 1].lambda } else { f64::NEG_INFINITY };
        let after = if j + 1 < pts.len() { pts[j + 1].lambda } else { f64::NEG_INFINITY };
        let is_peak = lam > before && lam > after && k > 0 && j + 1 < pts.len();
        if is_peak {
            if j > k {
                let norms = pts[k..=j].iter().map(|p| p.norm_inf);
                let lo = norms.clone().fold(f64::INFINITY, f64::min);
                let hi = norms.fold(f64::NEG_INFINITY, f64::max);
                let (idx, _) = pts[k..=j]
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.mu1.abs().total_cmp(&b.1.mu1.abs()))
                    .unwrap();
                let p = &pts[k + idx];
                out.push(Fold {
                    index: k + idx,
                    lambda: p.lambda,
                    values: p.values.clone(),
                    mu1: p.mu1,
                    kind: FoldKind::Degenerate {
                        norm_range: (lo, hi),
                        indices: (k, j),
                    },
                });
            } else {
                // prefer a flagged fold point next to the peak
                let idx = b
                    .folds
                    .iter()
                    .copied()
                    .find(|&f| f + 1 >= i && f <= i + 1)
                    .unwrap_or(i);
                let p = &pts[idx];
                out.push(Fold {
                    index: idx,
                    lambda: p.lambda,
                    values: p.values.clone(),
                    mu1: p.mu1,
                    kind: FoldKind::Turning,
                });
            }
        }
        i = j + 1;
    }
    // a flagged fold that ends the branch has no successor to compare with
    for &fi in &b.folds {
        if !out.iter().any(|f| f.index == fi || matches!(f.kind, FoldKind::Degenerate { indices: (a, z), .. } if a <= fi && fi <= z)) {
            let p = &pts[fi];
            out.push(Fold {
                index: fi,
                lambda: p.lambda,
                values: p.values.clone(),
                mu1: p.mu1,
                kind: FoldKind::Turning,
            });
        }
    }
    out.sort_by_key(|f| f.index);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    /// Index of the point after the jump.
    pub index: usize,
    pub lambda_before: f64,
    pub lambda_after: f64,
    pub norm_before: f64,
    pub norm_after: f64,
}

/// Consecutive points whose sup-norms differ by more than `min_jump`.
pub fn find_jumps(b: &Branch, min_jump: f64) -> Vec<Jump> {
    b.points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1].norm_inf - w[0].norm_inf).abs() > min_jump)
        .map(|(i, w)| Jump {
            index: i + 1,
            lambda_before: w[0].lambda,
            lambda_after: w[1].lambda,
            norm_before: w[0].norm_inf,
            norm_after: w[1].norm_inf,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeOptions {
    /// Upper bound on the number of seeds, `k^|Omega| <= max_seeds`.
    pub max_seeds: usize,
    pub dedup_tol: f64,
    pub newton: NewtonOptions,
    /// Seed box; the envelope levels when absent.
    pub bounds: Option<(f64, f64)>,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            max_seeds: 729,
            dedup_tol: 1e-6,
            newton: NewtonOptions::default(),
            bounds: None,
        }
    }
}

/// Levels per vertex: the largest `k >= 1` with `k^n <= max_seeds`.
pub fn lattice_levels(n: usize, max_seeds: usize) -> usize {
    let mut k = 1usize;
    while (k + 1).checked_pow(n as u32).is_some_and(|p| p <= max_seeds) {
        k += 1;
    }
    k
}

/// All solutions reached by Newton from a deterministic lattice of seeds,
/// deduplicated and sorted by sup-norm.
pub fn solution_lattice(
    d: &DirichletDomain,
    f: &Nonlinearity,
    lambda: f64,
    opts: &LatticeOptions,
) -> Result<Vec<Solution>> {
    let n = d.n_interior();
    let (lo, hi) = match opts.bounds {
        Some(b) => b,
        None => match critical_s0(f) {
            Ok(e) if lambda > 0.0 && lambda <= e.lambda_cap => (e.g1_inv(lambda)?, e.g2_inv(lambda)?),
            _ => (0.0, 10.0),
        },
    };
    let k = lattice_levels(n, opts.max_seeds);
    let level = |i: usize| {
        if k == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (k - 1) as f64
        }
    };
    let total = k.pow(n as u32);
    let seeds: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let v = level(idx % k);
                    idx /= k;
                    v
                })
                .collect()
        })
        .collect();
    let found: Vec<Solution> = seeds
        .par_iter()
        .map(|s| newton_solve(d, f, lambda, s, &opts.newton).map(NewtonOutcome::solution))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .filter(|s| !f.is_admissible() || s.values.iter().all(|&v| v >= -1e-10))
        .collect();
    let mut unique: Vec<Solution> = Vec::new();
    for s in found {
        if !unique.iter().any(|u| dist_inf(&u.values, &s.values) <= opts.dedup_tol) {
            unique.push(s);
        }
    }
    unique.sort_by(|a, b| {
        a.norm_inf()
            .total_cmp(&b.norm_inf())
            .then_with(|| a.values.partial_cmp(&b.values).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(unique)
}

/// Parameter at which the lattice count drops below `count`, by bisection on
/// `[lo, hi]` where the count is at least `count` at `lo` and below it at `hi`.
pub fn count_threshold(
    d: &DirichletDomain,
    f: &Nonlinearity,
    (mut lo, mut hi): (f64, f64),
    count: usize,
    tol: f64,
    opts: &LatticeOptions,
) -> Result<f64> {
    let n_at = |lam: f64| solution_lattice(d, f, lam, opts).map(|v| v.len());
    if n_at(lo)? < count || n_at(hi)? >= count {
        return Err(Error::NonMonotonePredicate(lo));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if n_at(mid)? >= count {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramRow {
    pub branch: String,
    pub arc: f64,
    pub lambda: f64,
    pub norm_inf: f64,
    pub mu1: f64,
    pub stable: bool,
    pub values: Vec<f64>,
}

/// Bifurcation-diagram table: one row per branch point.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub vertex_labels: Vec<String>,
    pub rows: Vec<DiagramRow>,
}

impl Diagram {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["branch", "arc", "lambda", "norm_inf", "mu1", "stable"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend(self.vertex_labels.iter().map(|l| format!("u_{l}")));
        h
    }

    pub fn branch_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.branch) {
                names.push(r.branch.clone());
            }
        }
        names
    }
}

/// Merges branches into one table sorted by branch order, then arclength.
pub fn assemble_diagram(vertex_labels: Vec<String>, branches: &[Branch]) -> Diagram {
    let mut rows = Vec::new();
    for b in branches {
        let mut pts: Vec<&BranchPoint> = b.points.iter().collect();
        pts.sort_by(|a, c| a.arc.total_cmp(&c.arc));
        rows.extend(pts.into_iter().map(|p| DiagramRow {
            branch: b.label.to_string(),
            arc: p.arc,
            lambda: p.lambda,
            norm_inf: p.norm_inf,
            mu1: p.mu1,
            stable: p.stable(),
            values: p.values.clone(),
        }));
    }
    Diagram {
        vertex_labels,
        rows,
    }
}

/// Labels for `count` solutions ordered by increasing sup-norm.
pub fn norm_order_labels(count: usize) -> Vec<BranchLabel> {
    (0..count)
        .map(|i| match i {
            0 => BranchLabel::Minimal,
            _ if i + 1 == count => BranchLabel::Upper,
            _ => BranchLabel::Other(format!("u{}", i + 1)),
        })
        .collect()
}

/// Joins a backward and a forward continuation from the same start into one
/// branch with arclength measured from the backward end.
fn join(label: BranchLabel, back: Branch, fwd: Branch) -> Branch {
    let mut points: Vec<BranchPoint> = back.points.into_iter().rev().collect();
    let offset = points.len().saturating_sub(1);
    let mut folds: Vec<usize> = back
        .folds
        .iter()
        .map(|&i| offset - i)
        .collect();
    points.extend(fwd.points.into_iter().skip(1));
    folds.extend(fwd.folds.iter().map(|&i| i + offset));
    folds.sort_unstable();
    let mut arc = 0.0;
    for i in 0..points.len() {
        if i > 0 {
            arc += points[i].distance(&points[i - 1]);
        }
        points[i].arc = arc;
    }
    Branch {
        label,
        points,
        folds,
        stop: fwd.stop,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramOptions {
    /// Parameter at which solutions are enumerated and labelled.
    pub reference_lambda: f64,
    pub lattice: LatticeOptions,
    pub continuation: ContinuationOptions,
}

/// Every solution at the reference parameter, continued both ways until a
/// fold, the norm cap or `lambda = 0`.
pub fn build_diagram(d: &DirichletDomain, f: &Nonlinearity, opts: &DiagramOptions) -> Result<Diagram> {
    let sols = solution_lattice(d, f, opts.reference_lambda, &opts.lattice)?;
    let labels = norm_order_labels(sols.len());
    let mut branches = Vec::new();
    for (sol, label) in sols.iter().zip(labels) {
        let mut c = opts.continuation;
        c.stop_at_fold = true;
        c.direction = 1.0;
        let fwd = continue_branch(d, f, sol, &c)?;
        c.direction = -1.0;
        let back = continue_branch(d, f, sol, &c)?;
        branches.push(join(label, back, fwd));
    }
    Ok(assemble_diagram(d.interior_labels(), &branches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rws::WeightedGraph;
    use crate::scalar::{lambert_w0, lambert_wm1};
    use std::f64::consts::E;

    fn path4() -> DirichletDomain {
        let g = WeightedGraph::from_labeled_edges(&[("1", "2", 1.0), ("2", "3", 1.0), ("3", "4", 1.0)])
            .unwrap();
        DirichletDomain::with_labels(g, &["2", "3"]).unwrap()
    }

    #[test]
    fn extremal_parameter_path4() {
        let est = lambda_star_bisect(&path4(), &Nonlinearity::exp(), &LambdaStarOptions::default())
            .unwrap();
        assert!((est.lambda_star - 0.5 / E).abs() < 1e-6);
        assert!(est.bracket.1 - est.bracket.0 <= 1e-7);
        let u = est.u_star.unwrap();
        assert!(u.values.iter().all(|v| (v - 1.0).abs() < 1e-6), "{:?}", u.values);
        assert!((est.refined_lambda.unwrap() - 0.5 / E).abs() < 1e-12);
    }

    #[test]
    fn affine_has_no_extremal_solution() {
        let est = lambda_star_bisect(&path4(), &Nonlinearity::affine(), &LambdaStarOptions {
            tol_lambda: 1e-5,
            ..Default::default()
        })
        .unwrap();
        assert!((est.lambda_star - 0.5).abs() < 1e-5);
        assert!(est.u_star.is_none());
    }

    #[test]
    fn sweep_matches_lambert() {
        let d = path4();
        let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.009).collect();
        for opts in [
            SweepOptions::default(),
            SweepOptions {
                warm_start: false,
                parallel: true,
                ..Default::default()
            },
        ] {
            let b = sweep_minimal(&d, &Nonlinearity::exp(), &grid, &opts).unwrap();
            for p in &b.points {
                let exact = -lambert_w0(-2.0 * p.lambda).unwrap();
                assert!((p.norm_inf - exact).abs() < 1e-9);
            }
            assert!(detect_fold(&b).is_empty());
            assert!(b.points.windows(2).all(|w| w[1].arc > w[0].arc));
        }
        let err = sweep_minimal(&d, &Nonlinearity::exp(), &[0.1, 0.3], &SweepOptions::default());
        assert_eq!(err.unwrap_err(), Error::DivergedAt(0.3));
    }

    #[test]
    fn continuation_through_fold() {
        let d = path4();
        let f = Nonlinearity::exp();
        let start = minimal_solve(&d, &f, 0.01, &MinimalOptions::default())
            .unwrap()
            .solution()
            .unwrap();
        let b = continue_branch(&d, &f, &start, &ContinuationOptions::default()).unwrap();
        assert_eq!(b.stop, StopReason::NormCap);
        let folds = detect_fold(&b);
        assert_eq!(folds.len(), 1);
        let fold = &folds[0];
        assert!((fold.lambda - 0.5 / E).abs() < 1e-10);
        assert!(fold.mu1.abs() < 1e-6);
        for p in &b.points[fold.index + 1..] {
            let exact = -lambert_wm1(-2.0 * p.lambda).unwrap();
            assert!((p.values[0] - exact).abs() < 1e-6 && (p.values[1] - exact).abs() < 1e-6);
            assert!(p.mu1 < 0.0);
        }
        assert!(b.points.iter().all(|p| p.residual < 1e-9));
    }

    #[test]
    fn lattice_counts() {
        let d = path4();
        let f = Nonlinearity::exp();
        assert_eq!(lattice_levels(2, 729), 27);
        assert_eq!(lattice_levels(6, 729), 3);
        assert_eq!(solution_lattice(&d, &f, 0.05, &LatticeOptions::default()).unwrap().len(), 4);
        assert_eq!(solution_lattice(&d, &f, 0.1, &LatticeOptions::default()).unwrap().len(), 2);
    }

    #[test]
    fn labels_by_norm_order() {
        let l: Vec<String> = norm_order_labels(4).iter().map(|l| l.to_string()).collect();
        assert_eq!(l, ["minimal", "u2", "u3", "upper"]);
    }
}

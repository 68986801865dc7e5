//! Fixed-parameter solvers for `(I - P_Omega) u = lambda f(u)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dist_inf, norm_inf, Lu, Matrix};
use crate::rws::DirichletDomain;
use crate::scalar::{critical_s0, Nonlinearity};
use crate::spectral::smallest_eigenvalue_shifted;

/// A solution is stable when `mu1 >= -STAB_TOL`.
pub const STAB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub lambda: f64,
    /// `u` on Omega, in the domain's interior order.
    pub values: Vec<f64>,
    /// `||(I - P)u - lambda f(u)||_inf`
    pub residual: f64,
    pub mu1: f64,
    pub stable: bool,
    /// Produced by the monotone iteration from below.
    pub minimal: bool,
}

impl Solution {
    /// Wraps `values`, computing residual and stability index.
    pub fn new(
        d: &DirichletDomain,
        f: &Nonlinearity,
        lambda: f64,
        values: Vec<f64>,
        minimal: bool,
    ) -> Result<Solution> {
        let residual = residual_norm(d, f, lambda, &values);
        let mu1 = mu1_at(d, f, lambda, &values)?;
        Ok(Solution {
            lambda,
            values,
            residual,
            mu1,
            stable: mu1 >= -STAB_TOL,
            minimal,
        })
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.values)
    }
}

/// `(I - P)u - lambda f(u)`.
pub fn residual(d: &DirichletDomain, f: &Nonlinearity, lambda: f64, u: &[f64]) -> Vec<f64> {
    d.apply_operator(u)
        .into_iter()
        .zip(u)
        .map(|(a, &s)| a - lambda * f.value(s))
        .collect()
}

pub fn residual_norm(d: &DirichletDomain, f: &Nonlinearity, lambda: f64, u: &[f64]) -> f64 {
    norm_inf(&residual(d, f, lambda, u))
}

/// Solves `(I - P_Omega) u = rhs` with the domain's cached factorization.
pub fn linear_dirichlet_solve(d: &DirichletDomain, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != d.n_interior() {
        return Err(Error::DimensionMismatch {
            expected: d.n_interior(),
            found: rhs.len(),
        });
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side"));
    }
    d.operator_lu()?.solve(rhs)
}

/// Iterates `u_{n+1} = (I - P)^{-1} lambda f(u_n)` from a given start
/// (zero by default). Each item is the next iterate.
pub struct MonotoneIteration<'a> {
    lu: &'a Lu,
    f: &'a Nonlinearity,
    lambda: f64,
    current: Vec<f64>,
}

impl<'a> MonotoneIteration<'a> {
    pub fn new(d: &'a DirichletDomain, f: &'a Nonlinearity, lambda: f64) -> Result<Self> {
        Self::from_start(d, f, lambda, vec![0.0; d.n_interior()])
    }

    /// `start` must be a subsolution for the sequence to stay monotone,
    /// e.g. the minimal solution at a smaller parameter.
    pub fn from_start(
        d: &'a DirichletDomain,
        f: &'a Nonlinearity,
        lambda: f64,
        start: Vec<f64>,
    ) -> Result<Self> {
        if start.len() != d.n_interior() {
            return Err(Error::DimensionMismatch {
                expected: d.n_interior(),
                found: start.len(),
            });
        }
        Ok(MonotoneIteration {
            lu: d.operator_lu()?,
            f,
            lambda,
            current: start,
        })
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }
}

impl Iterator for MonotoneIteration<'_> {
    type Item = Result<Vec<f64>>;

    fn next(&mut self) -> Option<Self::Item> {
        let rhs: Vec<f64> = self
            .current
            .iter()
            .map(|&s| self.lambda * self.f.value(s))
            .collect();
        if rhs.iter().any(|v| !v.is_finite()) {
            return Some(Err(Error::NonFinite("nonlinearity")));
        }
        match self.lu.solve(&rhs) {
            Ok(next) => {
                self.current = next.clone();
                Some(Ok(next))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalOptions {
    /// Stop when `||u_n - u_{n-1}||_inf <= tol * max(1, ||u_n||_inf)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Divergence threshold on `||u_n||_inf`; derived from the envelope when absent.
    pub cap: Option<f64>,
}

impl Default for MinimalOptions {
    fn default() -> Self {
        MinimalOptions {
            tol: 1e-12,
            max_iter: 100_000,
            cap: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceReason {
    /// An iterate exceeded the cap.
    Cap { norm: f64, cap: f64 },
    /// No convergence within `max_iter`.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MinimalOutcome {
    Converged(Solution),
    Diverged {
        lambda: f64,
        iterations: usize,
        reason: DivergenceReason,
    },
}

impl MinimalOutcome {
    pub fn solution(self) -> Option<Solution> {
        match self {
            MinimalOutcome::Converged(s) => Some(s),
            MinimalOutcome::Diverged { .. } => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, MinimalOutcome::Converged(_))
    }
}

/// Default divergence cap: twice the upper envelope level when the envelope
/// exists, else `1e8`.
pub fn divergence_cap(f: &Nonlinearity, lambda: f64) -> f64 {
    match critical_s0(f) {
        Ok(e) => {
            let l = lambda.clamp(1e-12 * e.lambda_cap, e.lambda_cap);
            e.g2_inv(l).map_or(1e8, |v| 2.0 * v)
        }
        Err(_) => 1e8,
    }
}

/// Minimal solution by monotone iteration from zero.
pub fn minimal_solve(
    d: &DirichletDomain,
    f: &Nonlinearity,
    lambda: f64,
    opts: &MinimalOptions,
) -> Result<MinimalOutcome> {
    minimal_solve_from(d, f, lambda, vec![0.0; d.n_interior()], opts)
}

/// Minimal solution by monotone iteration from a subsolution `start`.
pub fn minimal_solve_from(
    d: &DirichletDomain,
    f: &Nonlinearity,
    lambda: f64,
    start: Vec<f64>,
    opts: &MinimalOptions,
) -> Result<MinimalOutcome> {
    if !f.is_admissible() {
        return Err(Error::NotAdmissible(f.name()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::OutOfDomain {
            what: "parameter",
            value: lambda,
        });
    }
    if lambda == 0.0 {
        let zero = vec![0.0; d.n_interior()];
        return Ok(MinimalOutcome::Converged(Solution::new(d, f, 0.0, zero, true)?));
    }
    let cap = opts.cap.unwrap_or_else(|| divergence_cap(f, lambda));
    let mut prev = start.clone();
    let mut it = MonotoneIteration::from_start(d, f, lambda, start)?;
    for n in 1..=opts.max_iter {
        let u = it.next().expect("iteration is infinite")?;
        let norm = norm_inf(&u);
        if !(norm <= cap) {
            return Ok(MinimalOutcome::Diverged {
                lambda,
                iterations: n,
                reason: DivergenceReason::Cap { norm, cap },
            });
        }
        let scale = norm.max(1.0);
        if dist_inf(&u, &prev) <= opts.tol * scale {
            let sol = Solution::new(d, f, lambda, u, true)?;
            let fscale = scale.max(lambda * sol.values.iter().map(|&s| f.value(s)).fold(0.0, f64::max));
            if sol.residual > 10.0 * opts.tol * fscale {
                return Err(Error::NoConvergence {
                    what: "monotone iteration residual check",
                    iterations: n,
                });
            }
            return Ok(MinimalOutcome::Converged(sol));
        }
        prev = u;
    }
    Ok(MinimalOutcome::Diverged {
        lambda,
        iterations: opts.max_iter,
        reason: DivergenceReason::IterationLimit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Success when `||F(u)||_inf <= tol * max(1, ||u||_inf)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NewtonOutcome {
    Converged(Solution),
    NoConvergence {
        last: Vec<f64>,
        residual: f64,
        iterations: usize,
        /// The Jacobian became singular: the iterate sits on a fold.
        fold: bool,
    },
}

impl NewtonOutcome {
    pub fn solution(self) -> Option<Solution> {
        match self {
            NewtonOutcome::Converged(s) => Some(s),
            NewtonOutcome::NoConvergence { .. } => None,
        }
    }
}

/// `F_u = (I - P) - lambda diag f'(u)`.
pub fn jacobian(d: &DirichletDomain, f: &Nonlinearity, lambda: f64, u: &[f64]) -> Matrix {
    let mut j = d.operator();
    for (i, &s) in u.iter().enumerate() {
        j[(i, i)] -= lambda * f.slope(s);
    }
    j
}

/// Damped Newton from `init`.
pub fn newton_solve(
    d: &DirichletDomain,
    f: &Nonlinearity,
    lambda: f64,
    init: &[f64],
    opts: &NewtonOptions,
) -> Result<NewtonOutcome> {
    if init.len() != d.n_interior() {
        return Err(Error::DimensionMismatch {
            expected: d.n_interior(),
            found: init.len(),
        });
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial guess"));
    }
    let mut u = init.to_vec();
    let mut r = residual(d, f, lambda, &u);
    let mut rn = norm_inf(&r);
    for n in 0..=opts.max_iter {
        if rn <= opts.tol * norm_inf(&u).max(1.0) {
            return Ok(NewtonOutcome::Converged(Solution::new(d, f, lambda, u, false)?));
        }
        if n == opts.max_iter {
            break;
        }
        let lu = match Lu::factor(&jacobian(d, f, lambda, &u)) {
            Ok(lu) => lu,
            Err(Error::Singular) => {
                return Ok(NewtonOutcome::NoConvergence {
                    last: u,
                    residual: rn,
                    iterations: n,
                    fold: true,
                })
            }
            Err(e) => return Err(e),
        };
        let step = lu.solve(&r)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, b)| a - t * b).collect();
            let tr = residual(d, f, lambda, &trial);
            let tn = norm_inf(&tr);
            if tn.is_finite() && tn < rn {
                u = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no decrease along the Newton direction; take the full step once
            // so a rounding-level plateau does not stall us forever
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, b)| a - b).collect();
            let tr = residual(d, f, lambda, &trial);
            let tn = norm_inf(&tr);
            if !(tn <= 2.0 * rn) {
                return Ok(NewtonOutcome::NoConvergence {
                    last: u,
                    residual: rn,
                    iterations: n,
                    fold: false,
                });
            }
            u = trial;
            r = tr;
            rn = tn;
        }
    }
    Ok(NewtonOutcome::NoConvergence {
        last: u,
        residual: rn,
        iterations: opts.max_iter,
        fold: false,
    })
}

fn mu1_at(d: &DirichletDomain, f: &Nonlinearity, lambda: f64, u: &[f64]) -> Result<f64> {
    let shift: Vec<f64> = u.iter().map(|&s| lambda * f.slope(s)).collect();
    smallest_eigenvalue_shifted(d, &shift)
}

/// Smallest eigenvalue of the linearization `(I - P) - lambda diag f'(u)`.
pub fn stability_mu1(d: &DirichletDomain, f: &Nonlinearity, sol: &Solution) -> Result<f64> {
    mu1_at(d, f, sol.lambda, &sol.values)
}

/// `1/4 sum_{x,y} nu(x) P_xy (u(y)-u(x))^2 - lambda sum_x nu(x) F(u(x))` with
/// `u` given on the closure.
pub fn energy(d: &DirichletDomain, f: &Nonlinearity, lambda: f64, u: &[f64]) -> Result<f64> {
    if u.len() != d.n_closure() {
        return Err(Error::DimensionMismatch {
            expected: d.n_closure(),
            found: u.len(),
        });
    }
    let dirichlet = 0.5 * d.dirichlet_form(u, u);
    let source: f64 = d
        .nu_omega()
        .iter()
        .zip(u)
        .map(|(n, &s)| n * f.primitive(s))
        .sum();
    Ok(dirichlet - lambda * source)
}

/// `Q_u(v) = <(I-P)v, v>_nu - lambda sum nu f'(u) v^2`.
pub fn quadratic_form(d: &DirichletDomain, f: &Nonlinearity, sol: &Solution, v: &[f64]) -> f64 {
    let av = d.apply_operator(v);
    d.nu_omega()
        .iter()
        .enumerate()
        .map(|(i, n)| n * (av[i] * v[i] - sol.lambda * f.slope(sol.values[i]) * v[i] * v[i]))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub residual: f64,
    /// Indices of negative entries.
    pub negative_entries: Vec<usize>,
    /// `Some(ok)` when the envelope applies.
    pub within_envelope: Option<bool>,
    pub mu1: f64,
    pub stable: bool,
    /// Smallest `Q_u(v) / ||v||^2_nu` over the random directions.
    pub min_quotient: f64,
    pub quadratic_form_consistent: bool,
    pub violations: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-checks a solution: residual, sign, envelope, and that `Q_u(v) >= mu1 ||v||^2`
/// on 100 random directions.
pub fn verify_solution(
    d: &DirichletDomain,
    f: &Nonlinearity,
    sol: &Solution,
    tol: f64,
) -> Result<VerificationReport> {
    let mut violations = Vec::new();
    let res = residual_norm(d, f, sol.lambda, &sol.values);
    if res > tol * sol.norm_inf().max(1.0) {
        violations.push(format!("residual {res:e} above tolerance {tol:e}"));
    }
    let negative_entries: Vec<usize> = sol
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < 0.0)
        .map(|(i, _)| i)
        .collect();
    if !negative_entries.is_empty() && f.is_admissible() {
        violations.push(format!("negative values at {negative_entries:?}"));
    }
    let within_envelope = match critical_s0(f) {
        Ok(e) if sol.lambda > 0.0 && sol.lambda <= e.lambda_cap => {
            let (lo, hi) = (e.g1_inv(sol.lambda)?, e.g2_inv(sol.lambda)?);
            let ok = sol
                .values
                .iter()
                .all(|&v| v >= lo - 1e-8 && v <= hi + 1e-8);
            if !ok {
                violations.push(format!("values leave the envelope [{lo}, {hi}]"));
            }
            Some(ok)
        }
        _ => None,
    };
    let mu1 = stability_mu1(d, f, sol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let nu = d.nu_omega();
    let mut min_quotient = f64::INFINITY;
    for _ in 0..100 {
        let v: Vec<f64> = (0..d.n_interior()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm2: f64 = v.iter().zip(nu).map(|(a, n)| n * a * a).sum();
        if norm2 == 0.0 {
            continue;
        }
        min_quotient = min_quotient.min(quadratic_form(d, f, sol, &v) / norm2);
    }
    let quadratic_form_consistent = min_quotient >= mu1 - 1e-9;
    if !quadratic_form_consistent {
        violations.push(format!(
            "quadratic form quotient {min_quotient} below mu1 {mu1}"
        ));
    }
    Ok(VerificationReport {
        residual: res,
        negative_entries,
        within_envelope,
        mu1,
        stable: mu1 >= -STAB_TOL,
        min_quotient,
        quadratic_form_consistent,
        violations,
    })
}

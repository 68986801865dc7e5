//! Built-in worked examples and the checks run by `gelfand demo`.

use std::collections::HashMap;
use std::f64::consts::E;
use std::fmt;

use crate::branch::{
    continue_branch, detect_fold, lambda_star_bisect, point_past_fold, solution_lattice, ContinuationOptions,
    ExtremalEstimate, FoldKind, LambdaStarOptions, LatticeOptions,
};
use crate::error::{Error, Result};
use crate::linalg::norm_inf;
use crate::rws::{DirichletDomain, WeightedGraph};
use crate::scalar::{lambert_w0, lambert_wm1, Nonlinearity, Segment};
use crate::solver::{
    minimal_solve, newton_solve, MinimalOptions, MinimalOutcome, MonotoneIteration, NewtonOptions,
};
use crate::spectral::{dirichlet_eigenpair, lambda_via_moments, smallest_eigenvalue_shifted};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Printed in the literature for this example.
    Literature,
    /// Closed-form expression worked out by hand.
    ClosedForm,
    /// Independent numerical computation.
    Oracle,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Literature => "literature",
            Provenance::ClosedForm => "closed-form",
            Provenance::Oracle => "oracle",
        })
    }
}

/// A computable quantity of an example.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    LambdaM,
    /// Moment estimate at `n`.
    Moments(usize),
    LambdaStar,
    UStarNorm,
    UStarAt(String),
    /// Minimal solution at a vertex.
    Minimal { lambda: f64, vertex: String },
    /// Solution past the first fold of the branch through the minimal one.
    Upper { lambda: f64, vertex: String },
    /// Number of distinct solutions found from the seed lattice.
    SolutionCount { lambda: f64 },
    /// 1 when the monotone iteration diverges.
    Diverges { lambda: f64 },
    /// Entry of `384/4 (I - P)^{-1}`.
    ScaledInverse { row: usize, col: usize },
    /// `k`-th monotone iterate from zero at a vertex.
    Iterate { k: usize, lambda: f64, vertex: String },
    /// First fold met by continuation from the minimal solution at `start`.
    FoldLambda { start: f64 },
    /// Norm range of a flat fold met by continuation.
    PlateauNormMin { start: f64, step: f64 },
    PlateauNormMax { start: f64, step: f64 },
    /// Smallest eigenvalue of the linearization at `u = 0`.
    Mu1AtZero { lambda: f64 },
    /// Newton on the nonlinearity truncated to `[0, 1]`, at a vertex.
    TruncatedNewton { lambda: f64, vertex: String },
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::LambdaM => write!(f, "lambda_m"),
            Quantity::Moments(n) => write!(f, "moment estimate n={n}"),
            Quantity::LambdaStar => write!(f, "lambda_star"),
            Quantity::UStarNorm => write!(f, "|u_star|_inf"),
            Quantity::UStarAt(v) => write!(f, "u_star({v})"),
            Quantity::Minimal { lambda, vertex } => write!(f, "minimal u({vertex}) at {lambda}"),
            Quantity::Upper { lambda, vertex } => write!(f, "upper u({vertex}) at {lambda}"),
            Quantity::SolutionCount { lambda } => write!(f, "solution count at {lambda}"),
            Quantity::Diverges { lambda } => write!(f, "diverges at {lambda}"),
            Quantity::ScaledInverse { row, col } => write!(f, "384 A^-1[{row},{col}]"),
            Quantity::Iterate { k, lambda, vertex } => write!(f, "iterate {k} u({vertex}) at {lambda}"),
            Quantity::FoldLambda { start } => write!(f, "fold lambda (from {start})"),
            Quantity::PlateauNormMin { .. } => write!(f, "flat fold min norm"),
            Quantity::PlateauNormMax { .. } => write!(f, "flat fold max norm"),
            Quantity::Mu1AtZero { lambda } => write!(f, "mu1(0) at {lambda}"),
            Quantity::TruncatedNewton { lambda, vertex } => {
                write!(f, "truncated Newton u({vertex}) at {lambda}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub quantity: Quantity,
    pub value: f64,
    pub tol: f64,
    pub provenance: Provenance,
}

fn expect(quantity: Quantity, value: f64, tol: f64, provenance: Provenance) -> Expectation {
    Expectation {
        quantity,
        value,
        tol,
        provenance,
    }
}

#[derive(Debug, Clone)]
pub struct BuiltinExample {
    pub name: String,
    pub description: String,
    pub domain: DirichletDomain,
    pub f: Nonlinearity,
    pub expected: Vec<Expectation>,
    /// Parameter at which the diagram enumerates solutions.
    pub reference_lambda: f64,
    /// Arclength step for continuation.
    pub step: f64,
}

fn path(weights: &[f64]) -> WeightedGraph {
    let edges: Vec<(String, String, f64)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| ((i + 1).to_string(), (i + 2).to_string(), w))
        .collect();
    WeightedGraph::from_labeled_edges(&edges).expect("valid path")
}

fn path_domain(weights: &[f64], omega: &[&str]) -> DirichletDomain {
    DirichletDomain::with_labels(path(weights), omega).expect("valid path domain")
}

fn w0(x: f64) -> f64 {
    lambert_w0(x).expect("in domain")
}

fn wm1(x: f64) -> f64 {
    lambert_wm1(x).expect("in domain")
}

/// Parses `name:key=value,...` into the name and a parameter map.
fn split_params(spec: &str) -> Result<(String, HashMap<String, f64>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let mut params = HashMap::new();
    if let Some(rest) = rest {
        for kv in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Io(format!("builtin parameter `{kv}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Io(format!("builtin parameter `{kv}` is not numeric")))?;
            params.insert(k.trim().to_string(), v);
        }
    }
    Ok((name.to_string(), params))
}

/// Names of the built-in examples, with their default parameters.
pub const BUILTIN_NAMES: &[&str] = &[
    "path4-exp",
    "path4-weighted:a=2,b=3",
    "path3-exp",
    "path5-exp",
    "khat-n:a=1,b=1,c=0,n=5",
    "envelope",
    "path4-asym",
    "path4-quartic",
    "path4-piecewise",
    "path4-power2",
    "path4-affine",
    "allen-cahn-ab:a=1,b=1",
    "regular-dirichlet:k=4",
];

pub fn builtin_corpus() -> Vec<BuiltinExample> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("default builtin"))
        .collect()
}

/// The piecewise example: `s^2 + 1` on `[0,1)`, `2s` on `[1,2]`, then
/// `(s-2)^2 + 2(s-2) + 4`.
pub fn piecewise_example() -> Nonlinearity {
    Nonlinearity::piecewise(vec![
        Segment {
            knot: 0.0,
            coeffs: vec![1.0, 0.0, 1.0],
        },
        Segment {
            knot: 1.0,
            coeffs: vec![2.0, 2.0],
        },
        Segment {
            knot: 2.0,
            coeffs: vec![4.0, 2.0, 1.0],
        },
    ])
    .expect("C1 segments")
}

pub fn quartic_example() -> Nonlinearity {
    Nonlinearity::polynomial(&[1.0, 36.0, 24.0, -10.0, 1.0]).expect("finite coefficients")
}

/// Looks up a builtin by name, with optional `:key=value,...` parameters.
pub fn builtin(spec: &str) -> Result<BuiltinExample> {
    use Provenance::*;
    let (name, p) = split_params(spec)?;
    let get = |k: &str, default: f64| p.get(k).copied().unwrap_or(default);
    let ex = |domain, f, expected, reference_lambda, description: &str| BuiltinExample {
        name: spec.to_string(),
        description: description.to_string(),
        domain,
        f,
        expected,
        reference_lambda,
        step: 0.05,
    };
    let v = |s: &str| s.to_string();
    Ok(match name.as_str() {
        "path4-exp" => {
            let mut expected = vec![
                expect(Quantity::LambdaM, 0.5, 1e-12, Literature),
                expect(Quantity::Moments(20), 0.5, 1e-3, ClosedForm),
                expect(Quantity::LambdaStar, 0.5 / E, 1e-6, Literature),
                expect(Quantity::UStarAt(v("2")), 1.0, 1e-6, Literature),
                expect(Quantity::UStarAt(v("3")), 1.0, 1e-6, Literature),
                expect(Quantity::FoldLambda { start: 0.01 }, 0.5 / E, 1e-8, Literature),
                expect(Quantity::SolutionCount { lambda: 0.05 }, 4.0, 0.0, Literature),
                expect(Quantity::SolutionCount { lambda: 0.1 }, 2.0, 0.0, Literature),
            ];
            for lam in [0.02, 0.1, 0.18] {
                expected.push(expect(
                    Quantity::Minimal {
                        lambda: lam,
                        vertex: v("2"),
                    },
                    -w0(-2.0 * lam),
                    1e-8,
                    Literature,
                ));
                expected.push(expect(
                    Quantity::Upper {
                        lambda: lam,
                        vertex: v("3"),
                    },
                    -wm1(-2.0 * lam),
                    1e-8,
                    Literature,
                ));
            }
            ex(
                path_domain(&[1.0, 1.0, 1.0], &["2", "3"]),
                Nonlinearity::exp(),
                expected,
                0.05,
                "unit path 1-2-3-4, interior {2,3}, f = e^s",
            )
        }
        "path4-weighted" => {
            let (a, b) = (get("a", 2.0), get("b", 3.0));
            let lm = b / (a + b);
            let lam = 0.5 * lm / E;
            ex(
                path_domain(&[b, a, b], &["2", "3"]),
                Nonlinearity::exp(),
                vec![
                    expect(Quantity::LambdaM, lm, 1e-12, Literature),
                    expect(Quantity::Moments(20), lm, 1e-3, Oracle),
                    expect(Quantity::LambdaStar, lm / E, 1e-6, Literature),
                    expect(
                        Quantity::Minimal {
                            lambda: lam,
                            vertex: v("2"),
                        },
                        -w0(-lam / lm),
                        1e-8,
                        ClosedForm,
                    ),
                ],
                lam,
                "path 1-2-3-4 with weights b, a, b, interior {2,3}, f = e^s",
            )
        }
        "path3-exp" => ex(
            path_domain(&[1.0, 1.0], &["2", "3"]),
            Nonlinearity::exp(),
            vec![expect(Quantity::LambdaStar, 0.106159, 5e-5, Literature)],
            0.05,
            "unit path 1-2-3, interior {2,3}, f = e^s",
        ),
        "path5-exp" => ex(
            path_domain(&[1.0, 1.0, 1.0, 1.0], &["2", "3", "4"]),
            Nonlinearity::exp(),
            vec![
                expect(Quantity::LambdaStar, 0.106159, 5e-5, Literature),
                expect(Quantity::UStarAt(v("3")), 1.164771, 5e-4, Literature),
            ],
            0.05,
            "unit path 1-2-3-4-5, interior {2,3,4}, f = e^s",
        ),
        "khat-n" => {
            let (a, b, c) = (get("a", 1.0), get("b", 1.0), get("c", 0.0));
            let n = get("n", 5.0);
            if !(n >= 3.0 && n.fract() == 0.0) || !(a > 0.0 && b > 0.0 && c >= 0.0) {
                return Err(Error::Io(format!("khat-n needs integer n >= 3, a, b > 0, c >= 0 (got {spec})")));
            }
            let n = n as usize;
            let mut edges: Vec<(String, String, f64)> = Vec::new();
            for i in 1..=n {
                edges.push((i.to_string(), (i % n + 1).to_string(), a));
                edges.push((i.to_string(), format!("-{i}"), b));
            }
            if c > 0.0 {
                for i in 1..=n {
                    for j in (i + 2)..=n {
                        if !(i == 1 && j == n) {
                            edges.push((i.to_string(), j.to_string(), c));
                        }
                    }
                }
            }
            let g = WeightedGraph::from_labeled_edges(&edges)?;
            let omega: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let k = (2.0 * a + (n as f64 - 3.0) * c + b) / b;
            let lam = 0.5 / (k * E);
            ex(
                DirichletDomain::with_labels(g, &omega)?,
                Nonlinearity::exp(),
                vec![
                    expect(Quantity::LambdaM, 1.0 / k, 1e-12, ClosedForm),
                    expect(Quantity::LambdaStar, 1.0 / (k * E), 1e-6, Literature),
                    expect(
                        Quantity::Minimal {
                            lambda: lam,
                            vertex: v("1"),
                        },
                        -w0(-k * lam),
                        1e-8,
                        Literature,
                    ),
                ],
                lam,
                "weighted complete graph on an n-cycle with one pendant boundary vertex each",
            )
        }
        "envelope" => {
            let mut edges: Vec<(String, String, f64)> = Vec::new();
            for i in 1..=4 {
                edges.push((i.to_string(), (i % 4 + 1).to_string(), 1.0));
                edges.push((i.to_string(), "5".into(), 1.0));
                edges.push((i.to_string(), format!("-{i}"), 1.0));
            }
            let g = WeightedGraph::from_labeled_edges(&edges)?;
            let inv384 = [
                [160.0, 80.0, 64.0, 80.0, 96.0],
                [80.0, 160.0, 80.0, 64.0, 96.0],
                [64.0, 80.0, 160.0, 80.0, 96.0],
                [80.0, 64.0, 80.0, 160.0, 96.0],
                [96.0, 96.0, 96.0, 96.0, 192.0],
            ];
            let mut expected = Vec::new();
            for (r, row) in inv384.iter().enumerate() {
                for (c, &val) in row.iter().enumerate() {
                    expected.push(expect(Quantity::ScaledInverse { row: r, col: c }, val, 1e-9, Literature));
                }
            }
            let lam: f64 = 0.05;
            let outer = 4.0 * lam * (5.0 * lam).exp() + lam * (6.0 * lam).exp();
            let center = 4.0 * lam * (5.0 * lam).exp() + 2.0 * lam * (6.0 * lam).exp();
            expected.push(expect(
                Quantity::Iterate {
                    k: 2,
                    lambda: lam,
                    vertex: v("1"),
                },
                outer,
                1e-12,
                Literature,
            ));
            expected.push(expect(
                Quantity::Iterate {
                    k: 2,
                    lambda: lam,
                    vertex: v("5"),
                },
                center,
                1e-12,
                Literature,
            ));
            ex(
                DirichletDomain::with_labels(g, &["1", "2", "3", "4", "5"])?,
                Nonlinearity::exp(),
                expected,
                lam,
                "4-cycle with hub 5 and a boundary vertex behind each rim vertex",
            )
        }
        "path4-asym" => ex(
            path_domain(&[1.0, 1.0, 2.0], &["2", "3"]),
            Nonlinearity::exp(),
            vec![expect(Quantity::SolutionCount { lambda: 0.02 }, 4.0, 0.0, Literature)],
            0.02,
            "path 1-2-3-4 with weights 1, 1, 2, interior {2,3}, f = e^s",
        ),
        "path4-quartic" => ex(
            path_domain(&[1.0, 1.0, 1.0], &["2", "3"]),
            quartic_example(),
            vec![
                expect(Quantity::LambdaStar, 0.0161546, 5e-5, Literature),
                expect(Quantity::UStarNorm, 5.1007955, 5e-3, Literature),
                // half the maximum of s/f(s) at its maximiser
                expect(Quantity::LambdaStar, 0.016052871695, 1e-6, Oracle),
            ],
            0.01,
            "unit path 1-2-3-4, interior {2,3}, f = s^4 - 10 s^3 + 24 s^2 + 36 s + 1",
        ),
        "path4-piecewise" => ex(
            path_domain(&[1.0, 1.0, 1.0], &["2", "3"]),
            piecewise_example(),
            vec![
                expect(Quantity::LambdaStar, 0.25, 1e-6, ClosedForm),
                expect(Quantity::PlateauNormMin { start: 0.05, step: 1e-3 }, 1.0, 1e-3, Literature),
                expect(Quantity::PlateauNormMax { start: 0.05, step: 1e-3 }, 2.0, 1e-3, Literature),
            ],
            0.1,
            "unit path 1-2-3-4, interior {2,3}, C1 piecewise f with a linear middle piece",
        ),
        "path4-power2" => {
            let lam: f64 = 0.1;
            let root = (1.0 - 8.0 * lam).sqrt();
            ex(
                path_domain(&[1.0, 1.0, 1.0], &["2", "3"]),
                Nonlinearity::power(2.0)?,
                vec![
                    expect(Quantity::LambdaStar, 0.125, 1e-6, Literature),
                    expect(Quantity::UStarAt(v("2")), 1.0, 1e-6, Literature),
                    expect(Quantity::UStarAt(v("3")), 1.0, 1e-6, Literature),
                    expect(
                        Quantity::Minimal {
                            lambda: lam,
                            vertex: v("2"),
                        },
                        4.0 * lam / (1.0 - 4.0 * lam + root),
                        1e-8,
                        ClosedForm,
                    ),
                    expect(
                        Quantity::Upper {
                            lambda: lam,
                            vertex: v("2"),
                        },
                        (1.0 - 4.0 * lam + root) / (4.0 * lam),
                        1e-8,
                        Literature,
                    ),
                    expect(Quantity::FoldLambda { start: 0.01 }, 0.125, 1e-8, Literature),
                ],
                0.05,
                "unit path 1-2-3-4, interior {2,3}, f = (1+s)^2",
            )
        }
        "path4-affine" => {
            let mut expected: Vec<Expectation> = [0.1, 0.3, 0.45]
                .iter()
                .map(|&lam| {
                    expect(
                        Quantity::Minimal {
                            lambda: lam,
                            vertex: v("2"),
                        },
                        lam / (0.5 - lam),
                        1e-10,
                        Literature,
                    )
                })
                .collect();
            expected.push(expect(Quantity::Diverges { lambda: 0.5 }, 1.0, 0.0, Literature));
            expected.push(expect(Quantity::LambdaStar, 0.5, 1e-12, ClosedForm));
            ex(
                path_domain(&[1.0, 1.0, 1.0], &["2", "3"]),
                Nonlinearity::affine(),
                expected,
                0.1,
                "unit path 1-2-3-4, interior {2,3}, f = 1 + s",
            )
        }
        "allen-cahn-ab" => {
            let (a, b) = (get("a", 1.0), get("b", 1.0));
            let lm = b / (a + b);
            let lam = 1.5 * lm;
            ex(
                path_domain(&[b, a, b], &["2", "3"]),
                Nonlinearity::allen_cahn(),
                vec![
                    expect(Quantity::LambdaM, lm, 1e-12, Literature),
                    expect(Quantity::Mu1AtZero { lambda: lm }, 0.0, 1e-12, ClosedForm),
                    expect(
                        Quantity::TruncatedNewton {
                            lambda: lam,
                            vertex: v("2"),
                        },
                        (1.0 - lm / lam).sqrt(),
                        1e-10,
                        ClosedForm,
                    ),
                ],
                lam,
                "path with weights b, a, b, interior {2,3}, f = s - s^3",
            )
        }
        "regular-dirichlet" => {
            let k = get("k", 4.0);
            if !(k > 1.0) {
                return Err(Error::Io(format!("regular-dirichlet needs k > 1 (got {spec})")));
            }
            // kite 1-2-3 triangle with tail 3-4; one shared boundary vertex 0
            let inner = [("1", "2"), ("2", "3"), ("3", "1"), ("3", "4")];
            let deg = |x: &str| inner.iter().filter(|(p, q)| *p == x || *q == x).count() as f64;
            let mut edges: Vec<(String, String, f64)> =
                inner.iter().map(|(p, q)| (p.to_string(), q.to_string(), 1.0)).collect();
            for x in ["1", "2", "3", "4"] {
                edges.push((x.to_string(), "0".into(), deg(x) / (k - 1.0)));
            }
            let g = WeightedGraph::from_labeled_edges(&edges)?;
            let lam = 0.5 / (k * E);
            ex(
                DirichletDomain::with_labels(g, &["1", "2", "3", "4"])?,
                Nonlinearity::exp(),
                vec![
                    expect(Quantity::LambdaStar, 1.0 / (k * E), 1e-6, Literature),
                    expect(
                        Quantity::Minimal {
                            lambda: lam,
                            vertex: v("4"),
                        },
                        -w0(-k * lam),
                        1e-8,
                        Literature,
                    ),
                ],
                lam,
                "kite graph whose vertices all send mass 1/k to the boundary",
            )
        }
        _ => return Err(Error::Io(format!("unknown builtin `{name}`"))),
    })
}

/// Result of one expectation check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub expectation: Expectation,
    pub computed: Result<f64>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        match &self.computed {
            Ok(v) => (v - self.expectation.value).abs() <= self.expectation.tol,
            Err(_) => false,
        }
    }
}

/// Evaluates quantities of one example, caching the expensive ones.
pub struct Evaluator<'a> {
    ex: &'a BuiltinExample,
    extremal: Option<ExtremalEstimate>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ex: &'a BuiltinExample) -> Self {
        Evaluator { ex, extremal: None }
    }

    fn index(&self, vertex: &str) -> Result<usize> {
        self.ex
            .domain
            .interior_index(vertex)
            .ok_or_else(|| Error::UnknownVertex(vertex.to_string()))
    }

    fn extremal(&mut self) -> Result<&ExtremalEstimate> {
        if self.extremal.is_none() {
            self.extremal = Some(lambda_star_bisect(&self.ex.domain, &self.ex.f, &LambdaStarOptions::default())?);
        }
        Ok(self.extremal.as_ref().unwrap())
    }

    fn minimal_values(&self, lambda: f64) -> Result<Vec<f64>> {
        match minimal_solve(&self.ex.domain, &self.ex.f, lambda, &MinimalOptions::default())? {
            MinimalOutcome::Converged(s) => Ok(s.values),
            MinimalOutcome::Diverged { .. } => Err(Error::DivergedAt(lambda)),
        }
    }

    pub fn evaluate(&mut self, q: &Quantity) -> Result<f64> {
        let d = &self.ex.domain;
        let f = &self.ex.f;
        match q {
            Quantity::LambdaM => Ok(dirichlet_eigenpair(d)?.value),
            Quantity::Moments(n) => Ok(*lambda_via_moments(d, *n)?.last().unwrap()),
            Quantity::LambdaStar => Ok(self.extremal()?.lambda_star),
            Quantity::UStarNorm => self
                .extremal()?
                .u_star
                .as_ref()
                .map(|s| s.norm_inf())
                .ok_or(Error::Unbounded),
            Quantity::UStarAt(v) => {
                let i = self.index(v)?;
                self.extremal()?
                    .u_star
                    .as_ref()
                    .map(|s| s.values[i])
                    .ok_or(Error::Unbounded)
            }
            Quantity::Minimal { lambda, vertex } => {
                let i = self.index(vertex)?;
                Ok(self.minimal_values(*lambda)?[i])
            }
            Quantity::Upper { lambda, vertex } => {
                let i = self.index(vertex)?;
                let sol = minimal_solve(d, f, *lambda, &MinimalOptions::default())?
                    .solution()
                    .ok_or(Error::DivergedAt(*lambda))?;
                let opts = ContinuationOptions {
                    step: self.ex.step,
                    ..Default::default()
                };
                let b = continue_branch(d, f, &sol, &opts)?;
                point_past_fold(d, f, &b, *lambda)?
                    .map(|s| s.values[i])
                    .ok_or(Error::NoConvergence {
                        what: "upper branch",
                        iterations: b.points.len(),
                    })
            }
            Quantity::SolutionCount { lambda } => {
                Ok(solution_lattice(d, f, *lambda, &LatticeOptions::default())?.len() as f64)
            }
            Quantity::Diverges { lambda } => {
                let out = minimal_solve(d, f, *lambda, &MinimalOptions::default())?;
                Ok(if out.is_converged() { 0.0 } else { 1.0 })
            }
            Quantity::ScaledInverse { row, col } => {
                let inv = d.operator_lu()?.inverse()?;
                Ok(inv[(*row, *col)] * 384.0 / 4.0)
            }
            Quantity::Iterate { k, lambda, vertex } => {
                let i = self.index(vertex)?;
                let mut it = MonotoneIteration::new(d, f, *lambda)?;
                let mut last = Vec::new();
                for _ in 0..*k {
                    last = it.next().expect("infinite")?;
                }
                Ok(last[i])
            }
            Quantity::FoldLambda { start } => {
                let sol = minimal_solve(d, f, *start, &MinimalOptions::default())?
                    .solution()
                    .ok_or(Error::DivergedAt(*start))?;
                let b = continue_branch(
                    d,
                    f,
                    &sol,
                    &ContinuationOptions {
                        step: self.ex.step,
                        stop_at_fold: true,
                        ..Default::default()
                    },
                )?;
                detect_fold(&b)
                    .first()
                    .map(|fo| fo.lambda)
                    .ok_or(Error::NoConvergence {
                        what: "fold search",
                        iterations: b.points.len(),
                    })
            }
            Quantity::PlateauNormMin { start, step } | Quantity::PlateauNormMax { start, step } => {
                let sol = minimal_solve(d, f, *start, &MinimalOptions::default())?
                    .solution()
                    .ok_or(Error::DivergedAt(*start))?;
                let b = continue_branch(
                    d,
                    f,
                    &sol,
                    &ContinuationOptions {
                        step: *step,
                        max_points: 20_000,
                        norm_cap: 4.0,
                        ..Default::default()
                    },
                )?;
                let range = detect_fold(&b).into_iter().find_map(|fo| match fo.kind {
                    FoldKind::Degenerate { norm_range, .. } => Some(norm_range),
                    FoldKind::Turning => None,
                });
                let (lo, hi) = range.ok_or(Error::NoConvergence {
                    what: "flat fold search",
                    iterations: b.points.len(),
                })?;
                Ok(if matches!(q, Quantity::PlateauNormMin { .. }) { lo } else { hi })
            }
            Quantity::Mu1AtZero { lambda } => {
                let shift: Vec<f64> = vec![lambda * f.slope(0.0); d.n_interior()];
                smallest_eigenvalue_shifted(d, &shift)
            }
            Quantity::TruncatedNewton { lambda, vertex } => {
                let i = self.index(vertex)?;
                let t = f.truncated(0.0, 1.0)?;
                let init = vec![0.5; d.n_interior()];
                match newton_solve(d, &t, *lambda, &init, &NewtonOptions::default())? {
                    crate::solver::NewtonOutcome::Converged(s) => {
                        if norm_inf(&s.values) == 0.0 {
                            return Err(Error::NoConvergence {
                                what: "truncated Newton (trivial solution)",
                                iterations: 0,
                            });
                        }
                        Ok(s.values[i])
                    }
                    crate::solver::NewtonOutcome::NoConvergence { iterations, .. } => {
                        Err(Error::NoConvergence {
                            what: "truncated Newton",
                            iterations,
                        })
                    }
                }
            }
        }
    }
}

/// Runs every expectation of an example.
pub fn run_checks(ex: &BuiltinExample) -> Vec<CheckResult> {
    let mut ev = Evaluator::new(ex);
    ex.expected
        .iter()
        .map(|e| CheckResult {
            expectation: e.clone(),
            computed: ev.evaluate(&e.quantity),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_builtin_constructs() {
        let c = builtin_corpus();
        assert_eq!(c.len(), BUILTIN_NAMES.len());
        for ex in &c {
            assert!(!ex.expected.is_empty(), "{}", ex.name);
        }
    }

    #[test]
    fn parameters_and_errors() {
        let ex = builtin("khat-n:a=2,b=1,c=0.5,n=6").unwrap();
        assert_eq!(ex.domain.n_interior(), 6);
        assert!(builtin("nope").is_err());
        assert!(builtin("khat-n:n=2").is_err());
        assert!(builtin("path4-weighted:a").is_err());
    }

    #[test]
    fn khat_closed_forms() {
        let ex = builtin("khat-n:a=1,b=1,c=0,n=5").unwrap();
        let mut ev = Evaluator::new(&ex);
        assert!((ev.evaluate(&Quantity::LambdaM).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let ex = builtin("khat-n:a=1,b=2,c=0.5,n=4").unwrap();
        let k = (2.0 + 0.5 + 2.0) / 2.0;
        let mut ev = Evaluator::new(&ex);
        assert!((ev.evaluate(&Quantity::LambdaM).unwrap() - 1.0 / k).abs() < 1e-12);
    }

    #[test]
    fn regular_dirichlet_leak_is_uniform() {
        let ex = builtin("regular-dirichlet:k=4").unwrap();
        assert!(ex.domain.leak().iter().all(|l| (l - 0.25).abs() < 1e-15));
    }
}

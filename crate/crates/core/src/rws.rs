//! Finite random walk spaces.
//!
//! A [`WeightedGraph`] carries symmetric nonnegative weights `w_xy`, the
//! transition kernel `P_xy = w_xy / d_x` and the reversible measure
//! `nu(x) = d_x`. A [`DirichletDomain`] fixes an interior set `Omega`, its
//! m-boundary (the outside vertices carrying positive weight into `Omega`)
//! and the interior block of the walk, which is all the Dirichlet problem
//! ever looks at.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    weights: Matrix,
    degrees: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph from 0-based vertex ids; labels are the ids themselves.
    pub fn from_edges(edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut b = GraphBuilder::new();
        // declare ids in order so that vertex index equals id
        let top = edges.iter().map(|&(x, y, _)| x.max(y) + 1).max().unwrap_or(0);
        for v in 0..top {
            b.vertex(v.to_string());
        }
        for &(x, y, w) in edges {
            b.edge(x.to_string(), y.to_string(), w);
        }
        b.build()
    }

    /// Builds a graph from labelled edges. Vertices are numbered in order of
    /// first appearance.
    pub fn from_labeled_edges<S: AsRef<str>>(edges: &[(S, S, f64)]) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for (x, y, w) in edges {
            b.edge(x.as_ref(), y.as_ref(), *w);
        }
        b.build()
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[(x, y)]
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn degree(&self, x: usize) -> f64 {
        self.degrees[x]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Transition probability `m_x({y}) = w_xy / d_x`.
    pub fn transition(&self, x: usize, y: usize) -> f64 {
        self.weights[(x, y)] / self.degrees[x]
    }

    /// `nu(A) = sum_{x in A} d_x`.
    pub fn measure(&self, set: &[usize]) -> f64 {
        set.iter().map(|&x| self.degrees[x]).sum()
    }
}

/// Incremental construction of a [`WeightedGraph`] from labelled vertices and edges.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, label: impl Into<String>) -> usize {
        let label = label.into();
        if let Some(&i) = self.index.get(&label) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        i
    }

    pub fn edge(&mut self, x: impl Into<String>, y: impl Into<String>, w: f64) -> &mut Self {
        let x = self.vertex(x);
        let y = self.vertex(y);
        self.edges.push((x, y, w));
        self
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        let n = self.labels.len();
        let mut weights = Matrix::zeros(n, n);
        let mut seen = HashSet::new();
        for &(x, y, w) in &self.edges {
            let (lx, ly) = (self.labels[x].clone(), self.labels[y].clone());
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight {
                    x: lx,
                    y: ly,
                    weight: w,
                });
            }
            if !seen.insert((x.min(y), x.max(y))) {
                return Err(Error::DuplicateEdge { x: lx, y: ly });
            }
            weights[(x, y)] = w;
            weights[(y, x)] = w;
        }
        let degrees: Vec<f64> = (0..n).map(|x| weights.row(x).iter().sum()).collect();
        if let Some(x) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedVertex(self.labels[x].clone()));
        }
        Ok(WeightedGraph {
            labels: self.labels.clone(),
            weights,
            degrees,
        })
    }
}

/// An interior set `Omega` of a weighted graph together with its m-boundary.
///
/// Local indexing: interior vertices come first in the order given, then the
/// boundary in increasing vertex order. Functions "on the closure" use that
/// order; functions "on Omega" only the first `n_interior()` slots.
#[derive(Debug)]
pub struct DirichletDomain {
    graph: WeightedGraph,
    omega: Vec<usize>,
    boundary: Vec<usize>,
    p_omega: Matrix,
    p_boundary: Matrix,
    leak: Vec<f64>,
    escape: Vec<f64>,
    nu_omega: Vec<f64>,
    operator_lu: OnceLock<Result<Lu>>,
}

impl Clone for DirichletDomain {
    fn clone(&self) -> Self {
        DirichletDomain {
            graph: self.graph.clone(),
            omega: self.omega.clone(),
            boundary: self.boundary.clone(),
            p_omega: self.p_omega.clone(),
            p_boundary: self.p_boundary.clone(),
            leak: self.leak.clone(),
            escape: self.escape.clone(),
            nu_omega: self.nu_omega.clone(),
            operator_lu: OnceLock::new(),
        }
    }
}

impl DirichletDomain {
    pub fn new(graph: WeightedGraph, omega: &[usize]) -> Result<Self> {
        let n = graph.n_vertices();
        if omega.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut inside = vec![false; n];
        for &x in omega {
            if x >= n {
                return Err(Error::UnknownVertex(x.to_string()));
            }
            if inside[x] {
                return Err(Error::RepeatedVertex(graph.label(x).to_string()));
            }
            inside[x] = true;
        }
        if omega.len() == n {
            return Err(Error::NoBoundary);
        }
        let boundary: Vec<usize> = (0..n)
            .filter(|&y| !inside[y] && omega.iter().any(|&x| graph.weight(x, y) > 0.0))
            .collect();
        let mut in_closure = inside.clone();
        for &y in &boundary {
            in_closure[y] = true;
        }

        let k = omega.len();
        let p_omega = Matrix::from_fn(k, k, |i, j| graph.transition(omega[i], omega[j]));
        let p_boundary = Matrix::from_fn(k, boundary.len(), |i, j| {
            graph.transition(omega[i], boundary[j])
        });
        let leak: Vec<f64> = (0..k).map(|i| p_boundary.row(i).iter().sum()).collect();
        let escape: Vec<f64> = omega
            .iter()
            .map(|&x| {
                (0..n)
                    .filter(|&y| !in_closure[y])
                    .map(|y| graph.transition(x, y))
                    .sum()
            })
            .collect();
        for (i, &x) in omega.iter().enumerate() {
            let kept: f64 = p_omega.row(i).iter().sum::<f64>() + leak[i];
            if kept <= 0.0 {
                return Err(Error::DeadRow(graph.label(x).to_string()));
            }
        }
        let nu_omega = omega.iter().map(|&x| graph.degree(x)).collect();
        let domain = DirichletDomain {
            graph,
            omega: omega.to_vec(),
            boundary,
            p_omega,
            p_boundary,
            leak,
            escape,
            nu_omega,
            operator_lu: OnceLock::new(),
        };
        if !domain.is_m_connected() {
            return Err(Error::NotMConnected);
        }
        if domain.leak.iter().sum::<f64>() <= 0.0 {
            return Err(Error::NoLeak);
        }
        Ok(domain)
    }

    /// Same as [`DirichletDomain::new`] with `Omega` given by vertex labels.
    pub fn with_labels<S: AsRef<str>>(graph: WeightedGraph, omega: &[S]) -> Result<Self> {
        let ids = omega
            .iter()
            .map(|l| {
                graph
                    .index_of(l.as_ref())
                    .ok_or_else(|| Error::UnknownVertex(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        DirichletDomain::new(graph, &ids)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior vertices followed by boundary vertices.
    pub fn closure(&self) -> Vec<usize> {
        self.omega.iter().chain(&self.boundary).copied().collect()
    }

    pub fn n_interior(&self) -> usize {
        self.omega.len()
    }

    pub fn n_closure(&self) -> usize {
        self.omega.len() + self.boundary.len()
    }

    /// Sub-stochastic block `P_xy`, x, y in Omega.
    pub fn p_omega(&self) -> &Matrix {
        &self.p_omega
    }

    /// `P_xy` for x in Omega, y on the boundary.
    pub fn p_boundary(&self) -> &Matrix {
        &self.p_boundary
    }

    /// `m_x(boundary)` for x in Omega.
    pub fn leak(&self) -> &[f64] {
        &self.leak
    }

    /// Mass sent from x in Omega to vertices outside the closure. Identically
    /// zero for graph domains built through [`DirichletDomain::new`].
    pub fn escape(&self) -> &[f64] {
        &self.escape
    }

    pub fn nu_omega(&self) -> &[f64] {
        &self.nu_omega
    }

    pub fn interior_labels(&self) -> Vec<String> {
        self.omega
            .iter()
            .map(|&x| self.graph.label(x).to_string())
            .collect()
    }

    /// Local interior index of a vertex label.
    pub fn interior_index(&self, label: &str) -> Option<usize> {
        let v = self.graph.index_of(label)?;
        self.omega.iter().position(|&x| x == v)
    }

    /// The Dirichlet operator `I - P_Omega`.
    pub fn operator(&self) -> Matrix {
        let k = self.n_interior();
        Matrix::from_fn(k, k, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self.p_omega[(i, j)]
        })
    }

    /// `D^{1/2} (I - P_Omega) D^{-1/2}`, symmetric by reversibility.
    pub fn symmetric_operator(&self) -> Matrix {
        let k = self.n_interior();
        let nu = &self.nu_omega;
        let m = Matrix::from_fn(k, k, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self.p_omega[(i, j)] * (nu[i] / nu[j]).sqrt()
        });
        // mirror the upper triangle so the result is exactly symmetric
        Matrix::from_fn(k, k, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] })
    }

    /// Cached LU factorization of `I - P_Omega`.
    pub fn operator_lu(&self) -> Result<&Lu> {
        self.operator_lu
            .get_or_init(|| Lu::factor(&self.operator()))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Extends a function on Omega by zero on the boundary.
    pub fn extend_by_zero(&self, u: &[f64]) -> Vec<f64> {
        let mut full = u.to_vec();
        full.resize(self.n_closure(), 0.0);
        full
    }

    /// `P~_xy` for x in Omega and y in the closure (local indices).
    fn p_tilde(&self, i: usize, j: usize) -> f64 {
        let k = self.n_interior();
        if j < k {
            self.p_omega[(i, j)]
        } else {
            self.p_boundary[(i, j - k)]
        }
    }

    /// `Delta_m u(x) = sum_y P~_xy u(y) - u(x)` for x in Omega, with `u` given on
    /// the closure. Mass escaping the closure is charged as if `u` vanished there.
    pub fn apply_laplacian(&self, u: &[f64]) -> Result<Vec<f64>> {
        let nc = self.n_closure();
        if u.len() != nc {
            return Err(Error::DimensionMismatch {
                expected: nc,
                found: u.len(),
            });
        }
        Ok((0..self.n_interior())
            .map(|i| {
                let avg: f64 = (0..nc).map(|j| self.p_tilde(i, j) * u[j]).sum();
                avg - u[i]
            })
            .collect())
    }

    /// `(I - P_Omega) u` for `u` on Omega (zero Dirichlet data).
    pub fn apply_operator(&self, u: &[f64]) -> Vec<f64> {
        let pu = self.p_omega.mul_vec(u);
        u.iter().zip(pu).map(|(a, b)| a - b).collect()
    }

    /// The m-interaction `L_m(A, B) = sum_{x in A} nu(x) m_x(B)` for vertex
    /// sets inside the closure.
    pub fn interaction(&self, a: &[usize], b: &[usize]) -> f64 {
        a.iter()
            .map(|&x| b.iter().map(|&y| self.graph.weight(x, y)).sum::<f64>())
            .sum()
    }

    /// Breadth-first connectivity of the positive-weight graph induced on Omega.
    pub fn is_m_connected(&self) -> bool {
        let k = self.n_interior();
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..k {
                if !seen[j] && self.p_omega[(i, j)] > 0.0 {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == k
    }

    /// Dirichlet form `1/2 sum_{x,y in closure} nu(x) P~_xy (u(y)-u(x)) (v(y)-v(x))`
    /// for `u`, `v` on the closure.
    pub fn dirichlet_form(&self, u: &[f64], v: &[f64]) -> f64 {
        let closure = self.closure();
        let mut s = 0.0;
        for (i, &x) in closure.iter().enumerate() {
            for (j, &y) in closure.iter().enumerate() {
                let w = self.graph.weight(x, y);
                if w > 0.0 {
                    s += w * (u[j] - u[i]) * (v[j] - v[i]);
                }
            }
        }
        0.5 * s
    }
}

/// `grad u (x, y) = u(y) - u(x)`.
pub fn nonlocal_gradient(u: &[f64], x: usize, y: usize) -> f64 {
    u[y] - u[x]
}

/// Discretizes a one-dimensional convolution kernel `J` on a uniform grid.
///
/// Interior nodes are the grid points of the open interval `(lo, hi)`; the
/// boundary consists of the grid points outside it within reach of `J`.
/// Off-diagonal weights are `J(x_i - x_j) * h`; whatever row mass the
/// quadrature misses is kept at the node as a self-loop, which cancels
/// in the Laplacian. Rows whose quadrature mass exceeds one are normalized.
#[derive(Debug, Clone)]
pub struct KernelSpace {
    pub domain: DirichletDomain,
    pub grid_step: f64,
    /// Node coordinates, indexed like the graph vertices.
    pub nodes: Vec<f64>,
}

pub fn build_kernel_space(
    kernel: impl Fn(f64) -> f64,
    support_radius: f64,
    grid_step: f64,
    omega_interval: (f64, f64),
) -> Result<KernelSpace> {
    let (lo, hi) = omega_interval;
    if !(grid_step > 0.0) || !(support_radius > 0.0) || !(hi > lo) {
        return Err(Error::Kernel(
            "grid step, support radius and interval length must be positive".into(),
        ));
    }
    let steps = |len: f64| -> Result<usize> {
        let r = len / grid_step;
        let k = r.round();
        if (r - k).abs() > 1e-9 * r.max(1.0) || k < 1.0 {
            return Err(Error::Kernel(format!(
                "grid step {grid_step} does not divide {len}"
            )));
        }
        Ok(k as usize)
    };
    let reach = steps(support_radius)?;
    let cells = steps(hi - lo)?;
    if cells < 2 {
        return Err(Error::EmptyDomain);
    }

    let samples: Vec<f64> = (0..=reach).map(|k| kernel(k as f64 * grid_step)).collect();
    if let Some(k) = samples.iter().position(|&j| !(j >= 0.0) || !j.is_finite()) {
        return Err(Error::Kernel(format!(
            "negative or non-finite sample at offset {}",
            k as f64 * grid_step
        )));
    }
    let last_offset = match samples.iter().rposition(|&j| j > 0.0) {
        Some(k) if k >= 1 => k,
        _ => return Err(Error::Kernel("empty support".into())),
    };

    // grid: interior nodes 1..cells-1, padded by last_offset nodes on each side
    let first = -(last_offset as i64);
    let last = cells as i64 + last_offset as i64;
    let nodes: Vec<f64> = (first..=last).map(|i| lo + i as f64 * grid_step).collect();
    let index = |i: i64| (i - first) as usize;
    let n = nodes.len();
    let mut w = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let off = (a as i64 - b as i64).unsigned_abs() as usize;
            if a != b && off <= last_offset {
                w[(a, b)] = samples[off] * grid_step;
            }
        }
    }
    let mut b = GraphBuilder::new();
    for (a, x) in nodes.iter().enumerate() {
        b.vertex(format!("{a}@{x}"));
    }
    for a in 0..n {
        let off_mass: f64 = w.row(a).iter().sum();
        let retained = (1.0 - off_mass).max(0.0);
        if retained > 0.0 {
            b.edge(b.labels[a].clone(), b.labels[a].clone(), retained);
        }
        for c in (a + 1)..n {
            if w[(a, c)] > 0.0 {
                b.edge(b.labels[a].clone(), b.labels[c].clone(), w[(a, c)]);
            }
        }
    }
    let graph = b.build()?;
    let omega: Vec<usize> = (1..cells as i64).map(index).collect();
    let domain = DirichletDomain::new(graph, &omega)?;
    Ok(KernelSpace {
        domain,
        grid_step,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> WeightedGraph {
        WeightedGraph::from_labeled_edges(&[("1", "2", 1.0), ("2", "3", 1.0), ("3", "4", 1.0)])
            .unwrap()
    }

    #[test]
    fn path_degrees() {
        assert_eq!(path4().degrees(), &[1.0, 2.0, 2.0, 1.0]);
        let g = WeightedGraph::from_labeled_edges(&[("1", "2", 1.0)]).unwrap();
        assert_eq!(g.degrees(), &[1.0, 1.0]);
        let g = WeightedGraph::from_labeled_edges(&[
            ("1", "2", 1.0),
            ("2", "3", 1.0),
            ("3", "4", 2.0),
        ])
        .unwrap();
        assert_eq!(g.degrees(), &[1.0, 2.0, 3.0, 2.0]);
    }

    #[test]
    fn graph_errors() {
        assert!(matches!(
            WeightedGraph::from_edges(&[(0, 1, 0.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge { .. })
        ));
        let mut b = GraphBuilder::new();
        b.vertex("lonely");
        b.edge("a", "b", 1.0);
        assert_eq!(b.build(), Err(Error::IsolatedVertex("lonely".into())));
        assert_eq!(GraphBuilder::new().build(), Err(Error::NoEdges));
    }

    #[test]
    fn loops_count_once_in_degree() {
        let g = WeightedGraph::from_edges(&[(0, 0, 0.5), (0, 1, 1.0)]).unwrap();
        assert_eq!(g.degrees(), &[1.5, 1.0]);
    }

    #[test]
    fn path4_domain() {
        let d = DirichletDomain::with_labels(path4(), &["2", "3"]).unwrap();
        let labels: Vec<_> = d.boundary().iter().map(|&x| d.graph().label(x)).collect();
        assert_eq!(labels, vec!["1", "4"]);
        assert_eq!(d.p_omega().row(0), &[0.0, 0.5]);
        assert_eq!(d.p_omega().row(1), &[0.5, 0.0]);
        assert_eq!(d.leak(), &[0.5, 0.5]);
        assert_eq!(d.nu_omega(), &[2.0, 2.0]);
    }

    #[test]
    fn path3_domain() {
        let g = WeightedGraph::from_labeled_edges(&[("1", "2", 1.0), ("2", "3", 1.0)]).unwrap();
        let d = DirichletDomain::with_labels(g, &["2", "3"]).unwrap();
        assert_eq!(d.boundary().len(), 1);
        assert_eq!(d.p_omega().row(0), &[0.0, 0.5]);
        assert_eq!(d.p_omega().row(1), &[1.0, 0.0]);
        assert_eq!(d.leak(), &[0.5, 0.0]);
    }

    #[test]
    fn complete_graph_single_interior_vertex() {
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let d = DirichletDomain::new(g, &[0]).unwrap();
        assert_eq!(d.boundary(), &[1, 2]);
        assert_eq!(d.p_omega().row(0), &[0.0]);
        assert_eq!(d.leak(), &[1.0]);
        assert!(d.is_m_connected());
    }

    #[test]
    fn domain_errors() {
        assert_eq!(
            DirichletDomain::new(path4(), &[]).unwrap_err(),
            Error::EmptyDomain
        );
        assert_eq!(
            DirichletDomain::new(path4(), &[0, 1, 2, 3]).unwrap_err(),
            Error::NoBoundary
        );
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)])
            .unwrap();
        assert_eq!(
            DirichletDomain::new(g, &[1, 3]).unwrap_err(),
            Error::NotMConnected
        );
        // a whole connected component has no leak
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(DirichletDomain::new(g, &[0, 1]).unwrap_err(), Error::NoLeak);
    }

    #[test]
    fn laplacian_on_path() {
        let d = DirichletDomain::with_labels(path4(), &["2", "3"]).unwrap();
        let (x, y) = (0.3, 1.7);
        let lap = d.apply_laplacian(&[x, y, 0.0, 0.0]).unwrap();
        assert!((lap[0] - (y / 2.0 - x)).abs() < 1e-15);
        assert!((lap[1] - (x / 2.0 - y)).abs() < 1e-15);
        let c = d.apply_laplacian(&[2.5; 4]).unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-15));
        assert!(matches!(
            d.apply_laplacian(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gradient_is_antisymmetric() {
        let u = [0.0, 1.0];
        assert_eq!(nonlocal_gradient(&u, 0, 1), 1.0);
        assert_eq!(nonlocal_gradient(&u, 1, 0), -1.0);
    }

    #[test]
    fn interaction_values() {
        let d = DirichletDomain::with_labels(path4(), &["2", "3"]).unwrap();
        assert_eq!(d.interaction(&[1], &[2]), 1.0);
        assert_eq!(d.interaction(&[0], &[3]), 0.0);
    }

    #[test]
    fn kernel_single_interior_node() {
        let ks = build_kernel_space(|z| if z.abs() < 1.0 { 0.5 } else { 0.0 }, 1.0, 0.5, (0.0, 1.0))
            .unwrap();
        assert_eq!(ks.domain.n_interior(), 1);
        // one interior node: the scalar problem leak * x = lambda f(x)
        let leak = ks.domain.leak()[0];
        assert!(leak > 0.0 && leak <= 1.0);
        assert!((1.0 - ks.domain.p_omega()[(0, 0)] - leak).abs() < 1e-15);
    }

    #[test]
    fn kernel_errors() {
        let neg = build_kernel_space(|_| -0.1, 1.0, 0.5, (0.0, 1.0));
        assert!(matches!(neg, Err(Error::Kernel(_))));
        let empty = build_kernel_space(|_| 0.0, 1.0, 0.5, (0.0, 1.0));
        assert!(matches!(empty, Err(Error::Kernel(_))));
        let bad_step = build_kernel_space(|_| 0.5, 1.0, 0.3, (0.0, 1.0));
        assert!(matches!(bad_step, Err(Error::Kernel(_))));
    }
}

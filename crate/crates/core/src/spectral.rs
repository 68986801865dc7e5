//! Dirichlet eigenpairs of `-Delta_m` on a domain.
//!
//! Everything goes through the symmetrized operator
//! `S = D^{1/2} (I - P_Omega) D^{-1/2}`, which shares its spectrum with
//! `I - P_Omega` and is symmetric because the walk is reversible.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix, SymmetricEigen};
use crate::rws::DirichletDomain;

/// Ground state of the Dirichlet problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Positive eigenvector normalized to max 1.
    pub vector: Vec<f64>,
    /// `(min, max)` of `vector`; the max is 1 by normalization.
    pub bounds: (f64, f64),
}

pub fn dirichlet_eigenpair(d: &DirichletDomain) -> Result<EigenPair> {
    let eig = symmetric_eigen(&d.symmetric_operator())?;
    let psi = eig.vector(0);
    let nu = d.nu_omega();
    let mut phi: Vec<f64> = psi.iter().zip(nu).map(|(p, n)| p / n.sqrt()).collect();
    let big = phi
        .iter()
        .copied()
        .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if big == 0.0 {
        return Err(Error::NotPositiveGroundState);
    }
    for v in &mut phi {
        *v /= big;
    }
    let min = phi.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::NotPositiveGroundState);
    }
    // the quotient's error is quadratic in the vector's, so it polishes the value
    let value = rayleigh_quotient(d, &phi);
    Ok(EigenPair {
        value,
        vector: phi,
        bounds: (min, 1.0),
    })
}

/// Full ascending spectrum with orthonormal eigenvectors of a symmetric matrix.
pub fn full_spectrum(sym: &Matrix) -> Result<SymmetricEigen> {
    symmetric_eigen(sym)
}

/// Moment estimates `1 - (g(2n)/g(n))^{1/n}`, `n = 1..=n_max`, where
/// `g(n) = nu^T P_Omega^n 1`.
pub fn lambda_via_moments(d: &DirichletDomain, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::OutOfDomain {
            what: "moment count",
            value: n_max as f64,
        });
    }
    let p = d.p_omega();
    let nu = d.nu_omega();
    // v = P^n 1 / scale, log_g[n] = ln g(n)
    let mut v = vec![1.0; d.n_interior()];
    let mut log_scale = 0.0;
    let mut log_g = Vec::with_capacity(2 * n_max + 1);
    log_g.push(nu.iter().sum::<f64>().ln());
    for _ in 0..2 * n_max {
        v = p.mul_vec(&v);
        let m = v.iter().copied().fold(0.0, f64::max);
        if !(m > 0.0) {
            return Err(Error::NonFinite("moment sequence"));
        }
        for x in &mut v {
            *x /= m;
        }
        log_scale += m.ln();
        let g: f64 = nu.iter().zip(&v).map(|(a, b)| a * b).sum();
        log_g.push(g.ln() + log_scale);
    }
    Ok((1..=n_max)
        .map(|n| 1.0 - ((log_g[2 * n] - log_g[n]) / n as f64).exp())
        .collect())
}

/// Smallest eigenvalue of `S - diag(shift)`.
pub fn smallest_eigenvalue_shifted(d: &DirichletDomain, shift: &[f64]) -> Result<f64> {
    let k = d.n_interior();
    if shift.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: shift.len(),
        });
    }
    if shift.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("spectral shift"));
    }
    let mut s = d.symmetric_operator();
    for (i, c) in shift.iter().enumerate() {
        s[(i, i)] -= c;
    }
    Ok(symmetric_eigen(&s)?.values[0])
}

/// `<(I-P)u, u>_nu / <u, u>_nu`.
pub fn rayleigh_quotient(d: &DirichletDomain, u: &[f64]) -> f64 {
    let au = d.apply_operator(u);
    let nu = d.nu_omega();
    let num: f64 = (0..u.len()).map(|i| nu[i] * au[i] * u[i]).sum();
    let den: f64 = (0..u.len()).map(|i| nu[i] * u[i] * u[i]).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rws::WeightedGraph;

    fn weighted_path(a: f64, b: f64) -> DirichletDomain {
        let g = WeightedGraph::from_labeled_edges(&[("1", "2", b), ("2", "3", a), ("3", "4", b)])
            .unwrap();
        DirichletDomain::with_labels(g, &["2", "3"]).unwrap()
    }

    #[test]
    fn path4_ground_state() {
        let e = dirichlet_eigenpair(&weighted_path(1.0, 1.0)).unwrap();
        assert!((e.value - 0.5).abs() < 1e-14);
        assert!(e.vector.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert_eq!(e.bounds.1, 1.0);
    }

    #[test]
    fn weighted_path_ground_state() {
        for (a, b) in [(2.0, 3.0), (1.0, 5.0), (7.0, 0.5)] {
            let e = dirichlet_eigenpair(&weighted_path(a, b)).unwrap();
            assert!((e.value - b / (a + b)).abs() < 1e-13, "{a} {b}");
        }
    }

    #[test]
    fn single_vertex() {
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (0, 0, 3.0)]).unwrap();
        let d = DirichletDomain::new(g, &[0]).unwrap();
        let e = dirichlet_eigenpair(&d).unwrap();
        assert!((e.value - 0.25).abs() < 1e-15);
        assert_eq!(e.vector, vec![1.0]);
        let m = lambda_via_moments(&d, 5).unwrap();
        assert!(m.iter().all(|v| (v - 0.25).abs() < 1e-13));
    }

    #[test]
    fn moments_on_path4() {
        let m = lambda_via_moments(&weighted_path(1.0, 1.0), 3).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn refinement_identity_and_rayleigh() {
        let g = WeightedGraph::from_edges(&[
            (0, 1, 1.0),
            (1, 2, 2.0),
            (2, 3, 0.5),
            (3, 4, 1.5),
            (1, 3, 0.7),
            (4, 5, 1.0),
        ])
        .unwrap();
        let d = DirichletDomain::new(g, &[1, 2, 3, 4]).unwrap();
        let e = dirichlet_eigenpair(&d).unwrap();
        let p_phi = d.p_omega().mul_vec(&e.vector);
        for (a, b) in e.vector.iter().zip(&p_phi) {
            assert!(((1.0 - e.value) * a - b).abs() < 1e-10);
        }
        assert!((rayleigh_quotient(&d, &e.vector) - e.value).abs() < 1e-10);
        assert!(e.value > 0.0 && e.value < 1.0);
    }

    #[test]
    fn enlarging_omega_lowers_lambda() {
        let edges: Vec<_> = (0..9).map(|i| (i, i + 1, 1.0)).collect();
        let g = WeightedGraph::from_edges(&edges).unwrap();
        let mut prev = f64::INFINITY;
        for len in 1..=8 {
            let omega: Vec<usize> = (1..=len).collect();
            let v = dirichlet_eigenpair(&DirichletDomain::new(g.clone(), &omega).unwrap())
                .unwrap()
                .value;
            assert!(v <= prev + 1e-14);
            prev = v;
        }
    }

    #[test]
    fn shifted_spectrum() {
        let d = weighted_path(1.0, 1.0);
        assert!((smallest_eigenvalue_shifted(&d, &[0.0, 0.0]).unwrap() - 0.5).abs() < 1e-14);
        assert!((smallest_eigenvalue_shifted(&d, &[0.3, 0.3]).unwrap() - 0.2).abs() < 1e-14);
        let lam = 1.0 / (2.0 * std::f64::consts::E);
        let c = lam * 1f64.exp();
        assert!(smallest_eigenvalue_shifted(&d, &[c, c]).unwrap().abs() < 1e-14);
    }
}

//! Oracles shared by the integration tests. Nothing here calls the solver
//! paths it is used to check.

#![allow(dead_code)]

use gelfand::{DirichletDomain, Error, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Principal branch of `w e^w = x` for `x` in `[-1/e, 0)`, by bisection on `[-1, 0]`.
pub fn w0_oracle(x: f64) -> f64 {
    assert!((-1.0 / std::f64::consts::E - 1e-16..0.0).contains(&x));
    bisect(-1.0, 0.0, |w| w * w.exp() - x)
}

/// Lower branch of `w e^w = x` for `x` in `[-1/e, 0)`, by bisection on `[-800, -1]`.
pub fn wm1_oracle(x: f64) -> f64 {
    assert!((-1.0 / std::f64::consts::E - 1e-16..0.0).contains(&x));
    bisect(-800.0, -1.0, |w| w * w.exp() - x)
}

pub fn unit_path4() -> DirichletDomain {
    let g = WeightedGraph::from_labeled_edges(&[("1", "2", 1.0), ("2", "3", 1.0), ("3", "4", 1.0)]).unwrap();
    DirichletDomain::with_labels(g, &["2", "3"]).unwrap()
}

/// Random symmetric weights on `n` vertices with edge probability `p`; may
/// leave vertices isolated.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            if rng.gen_bool(p) {
                edges.push((x, y, rng.gen_range(0.1..3.0)));
            }
        }
    }
    edges
}

/// A random m-connected domain: a random tree on `omega` plus extra edges,
/// with every interior vertex linked to some boundary vertex.
pub fn random_domain(seed: u64, n_omega: usize, n_boundary: usize) -> DirichletDomain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_omega + n_boundary;
    let mut w = vec![vec![0.0; n]; n];
    for x in 1..n_omega {
        let y = rng.gen_range(0..x);
        w[x][y] = rng.gen_range(0.1..3.0);
    }
    for x in 0..n {
        for y in 0..x {
            if w[x][y] == 0.0 && rng.gen_bool(0.3) {
                w[x][y] = rng.gen_range(0.1..3.0);
            }
        }
    }
    for b in n_omega..n {
        let x = rng.gen_range(0..n_omega);
        w[b.max(x)][b.min(x)] = rng.gen_range(0.1..3.0);
    }
    let mut edges = Vec::new();
    for x in 0..n {
        for y in 0..x {
            if w[x][y] > 0.0 {
                edges.push((y, x, w[x][y]));
            }
        }
    }
    let g = WeightedGraph::from_edges(&edges).unwrap();
    let omega: Vec<usize> = (0..n_omega).collect();
    DirichletDomain::new(g, &omega).unwrap()
}

/// `true` when `omega` cannot be split into two nonempty parts with no
/// weight between them, by enumerating every split.
pub fn brute_force_connected(edges: &[(usize, usize, f64)], omega: &[usize]) -> bool {
    let k = omega.len();
    let weight = |a: usize, b: usize| -> f64 {
        edges
            .iter()
            .filter(|(x, y, _)| (*x == a && *y == b) || (*x == b && *y == a))
            .map(|e| e.2)
            .sum()
    };
    // vertex omega[0] always sits in the first part
    for mask in 0u32..(1 << (k - 1)) {
        let in_a = |i: usize| i == 0 || mask & (1 << (i - 1)) == 0;
        if (0..k).all(in_a) {
            continue;
        }
        let mut between = 0.0;
        for i in 0..k {
            for j in 0..k {
                if in_a(i) && !in_a(j) {
                    between += weight(omega[i], omega[j]);
                }
            }
        }
        if between == 0.0 {
            return false;
        }
    }
    true
}

pub fn is_not_connected_error(e: &Error) -> bool {
    matches!(e, Error::NotMConnected)
}

mod common;

use common::{brute_force_connected, random_domain, unit_path4};
use gelfand::branch::{solution_lattice, LatticeOptions};
use gelfand::io::{fmt_num, parse_graph};
use gelfand::rws::nonlocal_gradient;
use gelfand::scalar::{critical_s0, lambert_w0, lambert_wm1, Nonlinearity};
use gelfand::solver::{minimal_solve, MinimalOptions, MonotoneIteration};
use gelfand::spectral::{dirichlet_eigenpair, rayleigh_quotient, smallest_eigenvalue_shifted};
use gelfand::{DirichletDomain, Error, WeightedGraph};
use proptest::prelude::*;

fn domain() -> impl Strategy<Value = DirichletDomain> {
    (any::<u64>(), 1usize..8, 1usize..4).prop_map(|(seed, k, b)| random_domain(seed, k, b))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_by_parts((d, u, v) in domain().prop_flat_map(|d| {
        let n = d.n_interior();
        (Just(d), vector(n), vector(n))
    })) {
        let lhs = d.dirichlet_form(&d.extend_by_zero(&u), &d.extend_by_zero(&v));
        let au = d.apply_operator(&u);
        let rhs: f64 = (0..u.len()).map(|i| d.nu_omega()[i] * au[i] * v[i]).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn walk_is_reversible(d in domain()) {
        let g = d.graph();
        for x in 0..g.n_vertices() {
            let row: f64 = (0..g.n_vertices()).map(|y| g.transition(x, y)).sum();
            prop_assert!((row - 1.0).abs() <= 1e-12);
            for y in 0..g.n_vertices() {
                let gap = g.degree(x) * g.transition(x, y) - g.degree(y) * g.transition(y, x);
                prop_assert!(gap.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn interaction_is_symmetric(d in domain(), mask in any::<u16>()) {
        let closure = d.closure();
        let (a, b): (Vec<usize>, Vec<usize>) = closure.iter().enumerate().fold((vec![], vec![]), |(mut a, mut b), (i, &x)| {
            if mask & (1 << (i % 16)) != 0 { a.push(x) } else { b.push(x) }
            (a, b)
        });
        prop_assert!((d.interaction(&a, &b) - d.interaction(&b, &a)).abs() <= 1e-12);
    }

    #[test]
    fn m_connectivity_matches_partitions(
        n in 3usize..12,
        raw in prop::collection::vec((0usize..12, 0usize..12, 0.1f64..2.0), 1..30),
        k in 1usize..11,
    ) {
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (x, y, w) in raw {
            let (x, y) = (x % n, y % n);
            if x != y && !edges.iter().any(|e| (e.0 == x && e.1 == y) || (e.0 == y && e.1 == x)) {
                edges.push((x, y, w));
            }
        }
        let g = match WeightedGraph::from_edges(&edges) {
            Ok(g) if g.n_vertices() == n => g,
            _ => return Ok(()),
        };
        let omega: Vec<usize> = (0..k.min(n - 1)).collect();
        let brute = brute_force_connected(&edges, &omega);
        let ours = !matches!(DirichletDomain::new(g, &omega), Err(Error::NotMConnected));
        prop_assert_eq!(brute, ours);
    }

    #[test]
    fn leibniz_rule(u in vector(6), v in vector(6), x in 0usize..6, y in 0usize..6) {
        let uv: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a * b).collect();
        let lhs = nonlocal_gradient(&uv, x, y);
        let rhs = u[x] * nonlocal_gradient(&v, x, y) + v[y] * nonlocal_gradient(&u, x, y);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn rayleigh_quotient_of_ground_state(d in domain()) {
        let e = dirichlet_eigenpair(&d).unwrap();
        // equals 1 when no two interior vertices are adjacent
        prop_assert!(e.value > 0.0 && e.value <= 1.0 + 1e-12, "{}", e.value);
        prop_assert!((rayleigh_quotient(&d, &e.vector) - e.value).abs() <= 1e-10);
        let pu = d.p_omega().mul_vec(&e.vector);
        for (p, v) in pu.iter().zip(&e.vector) {
            prop_assert!(((1.0 - e.value) * v - p).abs() <= 1e-10);
        }
        let c = 0.3;
        let shifted = smallest_eigenvalue_shifted(&d, &vec![c; d.n_interior()]).unwrap();
        prop_assert!((shifted - (e.value - c)).abs() <= 1e-10);
    }

    #[test]
    fn monotone_iterates_increase(d in domain(), t in 0.0f64..1.5) {
        let lam = t * dirichlet_eigenpair(&d).unwrap().value / std::f64::consts::E;
        let f = Nonlinearity::exp();
        let mut prev = vec![0.0; d.n_interior()];
        for item in MonotoneIteration::new(&d, &f, lam).unwrap().take(40) {
            let Ok(next) = item else { break };
            let drop = prev.iter().zip(&next).map(|(a, b)| a - b).fold(f64::MIN, f64::max);
            // exact arithmetic is monotone; once converged only rounding moves it
            let scale = next.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!(drop <= 1e-14 * scale, "drop {drop} at lambda {lam}");
            prev = next;
        }
    }

    #[test]
    fn lambert_identities(x in -0.36787944117144f64..0.0, y in 0.0f64..50.0) {
        let w = lambert_w0(x).unwrap();
        prop_assert!(w >= -1.0 && (w * w.exp() - x).abs() <= 1e-14);
        let m = lambert_wm1(x).unwrap();
        prop_assert!(m <= -1.0 && (m * m.exp() - x).abs() <= 1e-13 * x.abs().max(1e-300) + 1e-15);
        let p = lambert_w0(y).unwrap();
        prop_assert!((p * p.exp() - y).abs() <= 1e-12 * y.max(1.0));
    }

    #[test]
    fn envelope_inverts_g(p in 1.2f64..5.0, t in 0.01f64..0.99) {
        for f in [Nonlinearity::exp(), Nonlinearity::power(p).unwrap()] {
            let env = critical_s0(&f).unwrap();
            let lam = t * env.lambda_cap;
            let (lo, hi) = (env.g1_inv(lam).unwrap(), env.g2_inv(lam).unwrap());
            prop_assert!(lo <= env.s0 && env.s0 <= hi);
            prop_assert!((f.g(lo) - lam).abs() <= 1e-10 * lam.max(1.0));
            prop_assert!((f.g(hi) - lam).abs() <= 1e-10 * lam.max(1.0));
        }
    }

    #[test]
    fn slope_matches_finite_difference(s in 0.05f64..5.0, p in 1.0f64..4.0) {
        let fs = [
            Nonlinearity::exp(),
            Nonlinearity::power(p).unwrap(),
            Nonlinearity::affine(),
            Nonlinearity::allen_cahn(),
            Nonlinearity::log_one_plus(),
            Nonlinearity::polynomial(&[1.0, 36.0, 24.0, -10.0, 1.0]).unwrap(),
        ];
        for f in &fs {
            let h = 1e-6 * s.max(1.0);
            let fd = (f.value(s + h) - f.value(s - h)) / (2.0 * h);
            let (_, d1, d2) = f.eval_ext(s);
            prop_assert!((fd - d1).abs() <= 1e-5 * d1.abs().max(1.0), "{} at {s}: {fd} vs {d1}", f.name());
            let fd2 = (f.slope(s + h) - f.slope(s - h)) / (2.0 * h);
            prop_assert!((fd2 - d2).abs() <= 1e-4 * d2.abs().max(1.0), "{} f'' at {s}", f.name());
        }
    }

    #[test]
    fn numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn graph_parser_is_total(text in "(edge|omega|vertex|#|[0-9a-z .-]|\n){0,80}") {
        let _ = parse_graph(&text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn minimal_lies_below_every_solution(t in 0.05f64..0.95) {
        let d = unit_path4();
        let f = Nonlinearity::exp();
        let lam = t / (2.0 * std::f64::consts::E);
        let min = minimal_solve(&d, &f, lam, &MinimalOptions::default()).unwrap().solution().unwrap();
        for s in solution_lattice(&d, &f, lam, &LatticeOptions::default()).unwrap() {
            prop_assert!(s.values.iter().zip(&min.values).all(|(a, b)| a >= &(b - 1e-9)));
        }
    }
}

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use wavext_core::time::legendre::{legendre, legendre_and_derivative};
use wavext_core::time::{
    eval_legendre_series, l2_project_time, legendre_eval, ptau_project, rows_legendre_to_sigma,
    rows_sigma_to_legendre, GaussRule, Slab, TimePartition,
};

/// Solves the global characterization of `P_τ w` directly: value at `t = 0`,
/// derivative orthogonality against `P_{q−1}` on every slab and continuity at
/// the interior nodes, all as one dense system in per-slab Legendre coefficients.
fn global_ptau(
    q: usize,
    w: impl Fn(f64) -> f64,
    dw: impl Fn(f64) -> f64,
    part: &TimePartition,
) -> Vec<Vec<f64>> {
    let n = part.num_slabs();
    let dim = n * (q + 1);
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    let gauss = GaussRule::reference(30).unwrap();
    let mut row = 0;
    for k in 0..=q {
        a[(row, k)] = if k % 2 == 0 { 1.0 } else { -1.0 };
    }
    b[row] = w(0.0);
    row += 1;
    for slab in part.slabs() {
        let off = slab.index * (q + 1);
        let half = 0.5 * slab.len();
        for i in 0..q {
            for k in 0..=q {
                // ∫ L_k' L_i dt = ∫ P_k'(s) P_i(s) ds
                a[(row, off + k)] = gauss
                    .iter()
                    .map(|(s, g)| g * legendre_and_derivative(k, s).1 * legendre(i, s))
                    .sum();
            }
            b[row] = gauss
                .iter()
                .map(|(s, g)| g * half * dw(slab.start + half * (s + 1.0)) * legendre(i, s))
                .sum();
            row += 1;
        }
        if slab.index + 1 < n {
            let next = off + q + 1;
            for k in 0..=q {
                a[(row, off + k)] = 1.0;
                a[(row, next + k)] = -(if k % 2 == 0 { 1.0 } else { -1.0 });
            }
            row += 1;
        }
    }
    assert_eq!(row, dim);
    let x = a.lu().solve(&b).unwrap();
    (0..n)
        .map(|i| x.as_slice()[i * (q + 1)..(i + 1) * (q + 1)].to_vec())
        .collect()
}

#[test]
fn ptau_local_matches_global_definition() {
    let part = TimePartition::uniform(1.0, 4).unwrap();
    let q = 3;
    let local = ptau_project(q, |t| (3.0 * t).sin(), &part).unwrap();
    let global = global_ptau(q, |t| (3.0 * t).sin(), |t| 3.0 * (3.0 * t).cos(), &part);
    for slab in part.slabs() {
        for t in slab.sample_times(17) {
            let a = local.eval_on(&slab, t);
            let b = eval_legendre_series(&global[slab.index], &slab, t);
            assert!((a - b).abs() <= 1e-11, "t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn ptau_global_oracle_on_nonuniform_partition() {
    let part = TimePartition::new(vec![0.0, 0.1, 0.35, 0.5, 0.9, 1.3]).unwrap();
    for q in 1..=4 {
        let local = ptau_project(q, |t| (2.0 * t).exp() * t.cos(), &part).unwrap();
        let global = global_ptau(
            q,
            |t| (2.0 * t).exp() * t.cos(),
            |t| (2.0 * t).exp() * (2.0 * t.cos() - t.sin()),
            &part,
        );
        for slab in part.slabs() {
            for (a, b) in local.coeffs[slab.index].iter().zip(&global[slab.index]) {
                assert!((a - b).abs() <= 1e-11, "q={q}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn weighted_legendre_identity() {
    let rule = GaussRule::reference(12).unwrap();
    for tau in [1.0, 0.3] {
        let slab = Slab::new(0, 0.7, 0.7 + tau);
        for q in 1..=5 {
            let lhs: f64 = rule
                .iter()
                .map(|(s, w)| {
                    let t = slab.start + 0.5 * tau * (s + 1.0);
                    0.5 * tau
                        * w
                        * (t - slab.start)
                        * legendre_eval(q, &slab, t, false).unwrap()
                        * legendre_eval(q, &slab, t, true).unwrap()
                })
                .sum();
            let rhs = tau * q as f64 / (2 * q + 1) as f64;
            assert!((lhs - rhs).abs() <= 1e-12, "q={q} τ={tau}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn legendre_endpoint_signs() {
    let slab = Slab::new(0, 0.2, 0.45);
    for s in 0..=6 {
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(legendre_eval(s, &slab, slab.start, false).unwrap(), sign);
        assert_eq!(legendre_eval(s, &slab, slab.end, false).unwrap(), 1.0);
    }
}

proptest! {
    #[test]
    fn ptau_reproduces_random_polynomials(coeffs in prop::collection::vec(-3.0f64..3.0, 1..5), n in 1usize..6) {
        let q = coeffs.len() - 1;
        let q = q.max(1);
        let poly = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        let part = TimePartition::uniform(1.0, n).unwrap();
        let p = ptau_project(q, poly, &part).unwrap();
        for slab in part.slabs() {
            for t in slab.sample_times(5) {
                prop_assert!((p.eval_on(&slab, t) - poly(t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn l2_projection_is_idempotent(a in -2.0f64..2.0, b in 0.5f64..4.0, r in 0usize..6) {
        let slab = Slab::new(0, 0.3, 0.55);
        let c = l2_project_time(r, |t| (b * t + a).sin(), &slab).unwrap();
        let again = l2_project_time(r, |t| eval_legendre_series(&c, &slab, t), &slab).unwrap();
        for (x, y) in c.iter().zip(&again) {
            prop_assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn sigma_legendre_roundtrip(rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..7)) {
        let back = rows_sigma_to_legendre(&rows_legendre_to_sigma(&rows));
        for (r, s) in rows.iter().zip(&back) {
            for (x, y) in r.iter().zip(s) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

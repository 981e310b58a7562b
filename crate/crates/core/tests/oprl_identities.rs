//! Recursion engine checked against dense linear algebra and the Jost layer.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use opdecay::jost;
use opdecay::oprl::{self, JacobiParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(r: &mut ChaCha8Rng, len: usize) -> JacobiParams {
    let a = (0..len).map(|_| r.random_range(0.5..1.5)).collect();
    let b = (0..len).map(|_| r.random_range(-1.0..1.0)).collect();
    JacobiParams::finite_range(a, b).unwrap()
}

/// Orthonormalize `1, x p_0, x p_1, …` against the point measure by full
/// Gram–Schmidt, returning the values of each polynomial at the nodes.
fn gram_schmidt(nodes: &[f64], weights: &[f64], count: usize) -> Vec<Vec<f64>> {
    let dot = |u: &[f64], v: &[f64]| {
        u.iter()
            .zip(v)
            .zip(weights)
            .map(|((a, b), w)| a * b * w)
            .sum::<f64>()
    };
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0; nodes.len()]];
    while basis.len() < count {
        let mut v: Vec<f64> = basis
            .last()
            .unwrap()
            .iter()
            .zip(nodes)
            .map(|(p, x)| p * x)
            .collect();
        // Two passes keep the vectors orthogonal to rounding level.
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&v, u);
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= c * ui);
            }
        }
        let norm = dot(&v, &v).sqrt();
        basis.push(v.iter().map(|x| x / norm).collect());
    }
    basis
}

#[test]
fn orthonormal_polynomials_match_gram_schmidt() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let params = random_params(&mut r, 30);
        let n = r.random_range(1..=20);
        let measure = oprl::spectral_measure_oracle(&params, n + 5, 0.0).unwrap();
        let basis = gram_schmidt(measure.nodes(), measure.weights(), n + 1);
        for (j, &x) in measure.nodes().iter().enumerate() {
            let ev = oprl::eval_polys(&params, n, x).unwrap();
            for (k, column) in basis.iter().enumerate() {
                let scale = 1.0 + column[j].abs();
                assert!(
                    (ev.p[k] - column[j]).abs() < 1e-8 * scale,
                    "n={n} k={k} x={x}: {} vs {}",
                    ev.p[k],
                    column[j]
                );
            }
        }
    }
}

#[test]
fn characteristic_polynomial_is_monic_p() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let params = random_params(&mut r, 14);
        let n = r.random_range(1..=12);
        let j = oprl::truncated_matrix(&params, n, C64::new(0.0, 0.0)).unwrap();
        for _ in 0..10 {
            let z = C64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
            let det = (DMatrix::<C64>::identity(n, n) * z - &j).determinant();
            let (big_p, _) = oprl::monic_polys(&params, n, z).unwrap();
            assert!(
                (det - big_p[n]).norm() < 1e-10 * (1.0 + det.norm()),
                "n={n}: {det} vs {}",
                big_p[n]
            );
        }
    }
}

#[test]
fn m_function_matches_resolvent_entry() {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    let b = C64::new(0.0, -1.0);
    let z = C64::new(1.0, 1.0);
    for _ in 0..10 {
        let params = random_params(&mut r, 10);
        let n = r.random_range(1..=10);
        let j = oprl::truncated_matrix(&params, n, b).unwrap();
        let shifted = j - DMatrix::<C64>::identity(n, n) * z;
        let mut e0 = DVector::<C64>::zeros(n);
        e0[0] = C64::new(1.0, 0.0);
        let entry = shifted.lu().solve(&e0).unwrap()[0];
        let m = oprl::m_n_b(&params, n, b, z).unwrap();
        assert!((m - entry).norm() < 1e-10, "n={n}: {m} vs {entry}");
    }
}

#[test]
fn oracle_moments_match_matrix_powers() {
    let mut r = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..5 {
        let params = random_params(&mut r, 12);
        let measure = oprl::spectral_measure_oracle(&params, 10, 0.0).unwrap();
        let j = oprl::truncated_matrix(&params, 10, C64::new(0.0, 0.0))
            .unwrap()
            .map(|c| c.re);
        let mut v = DVector::<f64>::zeros(10);
        v[0] = 1.0;
        for l in 0..=9 {
            let direct = v[0];
            assert!(
                (measure.moment(l) - direct).abs() < 1e-9,
                "moment {l}: {} vs {direct}",
                measure.moment(l)
            );
            v = &j * v;
        }
    }
}

#[test]
fn dombrowski_nevai_s_factors_through_jost() {
    let mut r = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10 {
        let a = vec![r.random_range(0.5..1.5), r.random_range(0.5..1.5), 1.0];
        let b = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
        let params = JacobiParams::finite_range(a, b).unwrap();
        let x: f64 = 1.3;
        // z + 1/z = x with |z| = 1.
        let z = C64::new(x / 2.0, (1.0 - x * x / 4.0).sqrt());
        let product =
            jost::jost_g_ell(&params, z).unwrap() * jost::jost_g_ell(&params, 1.0 / z).unwrap();
        let s = oprl::dombrowski_nevai_s(&params, 3, x).unwrap();
        assert!((product - s).norm() < 1e-10, "{product} vs {s}");
    }
}

fn params_strategy() -> impl Strategy<Value = JacobiParams> {
    (1usize..20)
        .prop_flat_map(|len| {
            (
                prop::collection::vec(0.8..1.2f64, len),
                prop::collection::vec(-0.3..0.3f64, len),
            )
        })
        .prop_map(|(a, b)| JacobiParams::finite_range(a, b).unwrap())
}

proptest! {
    /// In double precision the Wronskian drifts by rounding relative to the
    /// size of the products it cancels.
    #[test]
    fn wronskian_is_one_up_to_rounding(params in params_strategy(), n in 1usize..40, x in -2.5..2.5f64) {
        let ev = oprl::eval_polys(&params, n, x).unwrap();
        for k in 1..=n {
            let a = params.a(k).unwrap();
            let (l, r) = (ev.p[k - 1] * ev.q[k], ev.p[k] * ev.q[k - 1]);
            let bound = 64.0 * f64::EPSILON * (k as f64) * (1.0 + a * (l.abs() + r.abs()));
            prop_assert!((a * (l - r) - 1.0).abs() <= bound);
        }
    }

    #[test]
    fn carmona_density_is_positive(params in params_strategy(), n in 1usize..20, x in -50.0..50.0f64) {
        prop_assert!(oprl::carmona_density(&params, n, x).unwrap() > 0.0);
    }

    #[test]
    fn three_term_recursion_holds(params in params_strategy(), n in 2usize..30, x in -2.0..2.0f64) {
        let ev = oprl::eval_polys(&params, n, x).unwrap();
        for k in 1..n {
            let lhs = x * ev.p[k];
            let rhs = params.a(k + 1).unwrap() * ev.p[k + 1] + params.b(k + 1).unwrap() * ev.p[k] + params.a(k).unwrap() * ev.p[k - 1];
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}

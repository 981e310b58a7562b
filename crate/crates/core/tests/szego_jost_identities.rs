use num_complex::Complex64 as C64;
use opdecay::analysis;
use opdecay::jost;
use opdecay::oprl::{self, JacobiParams};
use opdecay::opuc::{self, CircleMeasure, VerblunskyCoeffs};
use opdecay::series::TaylorSeries;
use opdecay::szego;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn dinv_radius_for_geometric_coefficients() {
    let coeffs = VerblunskyCoeffs::geometric(c(0.5), 2.0, 200).unwrap();
    let dinv = szego::dinv_from_alphas(&coeffs, 40).unwrap();
    let est = analysis::radius_estimate(&dinv, None).unwrap();
    assert!((est.radius - 2.0).abs() / 2.0 < 0.05, "{}", est.radius);
}

#[test]
fn szego_function_inverts_dinv() {
    let coeffs = VerblunskyCoeffs::zero_after_real(&[0.5]).unwrap();
    let m = opuc::bernstein_szego(&coeffs, 1, 4096).unwrap();
    let d = szego::d_from_weight(&m, 40).unwrap();
    let dinv = szego::dinv_from_alphas(&coeffs, 40).unwrap();
    let product = d.mul(&dinv);
    for k in 0..=40 {
        let want = if k == 0 { 1.0 } else { 0.0 };
        assert!(
            (product.coeff(k) - want).norm() < 1e-8,
            "coefficient {k}: {}",
            product.coeff(k)
        );
    }
}

#[test]
fn szego_function_boundary_modulus() {
    // w = 1 + cos(θ)/2 is already normalized. The Poisson smoothing error of
    // |D(r e^{iθ})|^2 is about (1 - r) times the size of w', so r must be
    // close to 1 for a 1e-3 comparison.
    let g = 4096;
    let w: Vec<f64> = (0..g)
        .map(|j| 1.0 + 0.5 * (TAU * j as f64 / g as f64).cos())
        .collect();
    let m = CircleMeasure::new(w.clone(), Vec::new()).unwrap();
    let d = szego::d_from_weight(&m, 200).unwrap();
    let r = 0.9999;
    let worst = (0..g)
        .step_by(16)
        .map(|j| {
            (d.eval(C64::from_polar(r, TAU * j as f64 / g as f64))
                .norm_sqr()
                - w[j])
                .abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn recovery_formulas_on_known_sequences() {
    let one = VerblunskyCoeffs::zero_after_real(&[0.5]).unwrap();
    let m = opuc::bernstein_szego(&one, 1, 1024).unwrap();
    let dinv = szego::dinv_from_alphas(&one, 4).unwrap();
    assert!((szego::recover_alpha_projection(&m, &dinv, 0).unwrap() - 0.5).norm() < 1e-8);
    assert!((szego::recover_alpha_tail(&m, &dinv, 0).unwrap() - 0.5).norm() < 1e-8);

    let alpha: Vec<f64> = (0..10).map(|n| 0.5 * 2f64.powi(-n)).collect();
    let coeffs = VerblunskyCoeffs::zero_after_real(&alpha).unwrap();
    let m = opuc::bernstein_szego(&coeffs, 10, 2048).unwrap();
    let dinv = szego::dinv_from_alphas(&coeffs, 12).unwrap();
    for (n, &want) in alpha.iter().enumerate() {
        let a = szego::recover_alpha_projection(&m, &dinv, n).unwrap();
        let b = szego::recover_alpha_tail(&m, &dinv, n).unwrap();
        assert!(
            (a - want).norm() < 1e-7 && (b - want).norm() < 1e-7,
            "n={n}: {a} {b}"
        );
        // The residual never exceeds the Taylor tail of D^{-1} beyond index n.
        let tail: f64 = dinv.coeffs()[n + 1..].iter().map(|c| c.norm()).sum();
        assert!((a - b).norm() <= tail + 1e-12);
    }
}

#[test]
fn recovery_of_zero_sequence_is_zero() {
    let m = CircleMeasure::lebesgue(256).unwrap();
    let dinv = szego::dinv_from_alphas(&VerblunskyCoeffs::zero(), 8).unwrap();
    for n in 0..4 {
        assert!(
            szego::recover_alpha_projection(&m, &dinv, n)
                .unwrap()
                .norm()
                < 1e-14
        );
        assert!(szego::recover_alpha_tail(&m, &dinv, n).unwrap().norm() < 1e-14);
    }
}

#[test]
fn s_series_radius_for_third_powers() {
    let coeffs = VerblunskyCoeffs::geometric(c(0.5), 3.0, 80).unwrap();
    let s = szego::s_series(&coeffs, 64).unwrap();
    let est = analysis::radius_estimate(&s, None).unwrap();
    assert!((est.radius - 3.0).abs() / 3.0 < 0.05, "{}", est.radius);
}

#[test]
fn r_series_matches_pointwise_formula() {
    // D^{-1} = (2/√3)(1 - z/2) gives r(z) = (1 - z/2) / (1 - 1/(2z)).
    let coeffs = VerblunskyCoeffs::zero_after_real(&[0.5]).unwrap();
    let dinv = szego::dinv_from_alphas(&coeffs, 64).unwrap();
    let r = szego::r_series(&dinv, 64).unwrap();
    // Rounding noise in c_{±64} is amplified by |z|^{±64}, so stay near the circle.
    for j in 0..10 {
        let z = C64::from_polar(0.85 + 0.035 * j as f64, 0.9 * j as f64);
        let want = (1.0 - z / 2.0) / (1.0 - 1.0 / (2.0 * z));
        assert!(
            (r.eval(z) - want).norm() < 1e-8,
            "z={z}: {} vs {want}",
            r.eval(z)
        );
    }
    for j in 0..64 {
        let z = C64::from_polar(1.0, TAU * j as f64 / 64.0);
        assert!((r.eval(z).norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn jost_boundary_identity_against_spectral_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let a = (0..4).map(|_| rng.random_range(0.7..1.3)).collect();
        let b = (0..4).map(|_| rng.random_range(-0.5..0.5)).collect();
        let params = JacobiParams::finite_range(a, b).unwrap();
        let u = jost::jost_series(&params).unwrap();
        let spectral = oprl::spectral_measure_oracle(&params, 600, 0.0).unwrap();
        for j in 1..32 {
            let t = PI * j as f64 / 32.0;
            let e = C64::from_polar(1.0, t);
            let im_m = jost::m_function_finite_range(&params, e).unwrap().im;
            assert!((u.eval(e).norm_sqr() * im_m - t.sin()).abs() < 1e-8);
        }
        for j in 0..10 {
            let z = C64::from_polar(0.2 + 0.04 * j as f64, 1.1 * j as f64);
            let direct = jost::m_function_point(&spectral, z).unwrap();
            let cf = jost::m_function_finite_range(&params, z).unwrap();
            assert!((direct - cf).norm() < 1e-8, "z={z}: {direct} vs {cf}");
        }
    }
}

#[test]
fn jost_zeros_are_eigenvalues() {
    for params in [
        JacobiParams::finite_range(vec![1.0, 1.0], vec![2.5, 0.0]).unwrap(),
        JacobiParams::finite_range(vec![1.6, 1.0], vec![0.0, 0.0]).unwrap(),
        JacobiParams::finite_range(vec![1.0, 1.2], vec![-1.8, 0.4]).unwrap(),
    ] {
        let oracle = oprl::spectral_measure_oracle(&params, 800, 0.0).unwrap();
        let outside: Vec<f64> = oracle
            .nodes()
            .iter()
            .copied()
            .filter(|x| x.abs() > 2.0 + 1e-3)
            .collect();
        assert!(!outside.is_empty());
        let data = jost::jost_data(&params).unwrap();
        for e in outside {
            let near = data
                .zeros_in_disk
                .iter()
                .map(|z| (jost::joukowski(*z) - e).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(
                near < 1e-6,
                "eigenvalue {e} missing from {:?}",
                data.eigenvalues
            );
        }
    }
}

#[test]
fn geronimus_map_doubles_the_decay_exponent() {
    let coeffs = VerblunskyCoeffs::geometric(c(0.5), 4.0, 40).unwrap();
    let params = szego::geronimus_map(&coeffs).unwrap();
    let count = params.defined_through().unwrap().min(30);
    let dev: Vec<C64> = (1..=count)
        .map(|n| c((params.a(n).unwrap() - 1.0).abs() + params.b(n).unwrap().abs()))
        .collect();
    let est = analysis::decay_rate(&dev, (4, count - 1)).unwrap();
    assert!((est.radius - 16.0).abs() / 16.0 < 0.05, "{}", est.radius);
}

#[test]
fn b_series_places_jacobi_deviations() {
    let half = VerblunskyCoeffs::constant(c(0.5), 12).unwrap();
    let params = szego::geronimus_map(&half).unwrap();
    let n = 2 * params.defined_through().unwrap() - 2;
    let b = szego::b_series(&params, n).unwrap();
    let mut want = vec![c(0.0); n + 1];
    want[0] = c(1.0);
    for k in 0..n / 2 {
        want[2 * k + 1] = c(-params.b(k + 1).unwrap());
        if 2 * k + 2 <= n {
            want[2 * k + 2] = c(1.0 - params.a(k + 1).unwrap().powi(2));
        }
    }
    for (k, w) in want.iter().enumerate() {
        assert!(
            (b.coeff(k) - w).norm() < 1e-15,
            "coefficient {k}: {} vs {w}",
            b.coeff(k)
        );
    }
}

#[test]
fn u_for_two_step_sequence() {
    let coeffs = VerblunskyCoeffs::zero_after_real(&[0.5, 0.0]).unwrap();
    let dinv = szego::dinv_from_alphas(&coeffs, 4).unwrap();
    let u = szego::u_from_d(&coeffs, &dinv).unwrap();
    // (1 - α_0^2)^{1/2} (1 - α_1)^{1/2} = √3/2 cancels the 2/√3 in D^{-1}.
    let want = TaylorSeries::from_real(&[1.0, -0.5]).unwrap();
    for k in 0..=4 {
        assert!(
            (u.u.coeff(k) - want.coeff(k)).norm() < 1e-15,
            "coefficient {k}: {}",
            u.u.coeff(k)
        );
    }
    assert!(u.zeros_in_disk.is_empty());
}

fn real_seq(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.6..0.6f64, 1..=len)
}

proptest! {
    #[test]
    fn s_series_is_affine_in_coefficients(a in real_seq(10), b in real_seq(10), t in -2.0..2.0f64) {
        let n = 12;
        let len = a.len().max(b.len());
        let pad = |v: &[f64]| (0..len).map(|i| v.get(i).copied().unwrap_or(0.0)).collect::<Vec<f64>>();
        let (pa, pb) = (pad(&a), pad(&b));
        let mix: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| 0.5 * (x + t * y)).collect();
        let s = |v: &[f64]| szego::s_series(&VerblunskyCoeffs::zero_after_real(v).unwrap(), n).unwrap();
        let (sa, sb, sm) = (s(&pa), s(&pb), s(&mix));
        for k in 1..=n {
            let lin = 0.5 * (sa.coeff(k) + t * sb.coeff(k));
            prop_assert!((sm.coeff(k) - lin).norm() < 1e-14);
        }
        prop_assert_eq!(sm.coeff(0), c(1.0));
    }

    #[test]
    fn b_series_is_affine_in_deviations(len in 1usize..6, x in prop::collection::vec(-0.4..0.4f64, 12), t in 0.2..0.8f64) {
        // B is affine in (b_n, a_n^2 - 1), so mix the squares.
        let make = |off: usize| {
            let a: Vec<f64> = (0..len).map(|i| 1.0 + x[off + i] * 0.5).collect();
            let b: Vec<f64> = (0..len).map(|i| x[(off + i + 3) % 12]).collect();
            (a, b)
        };
        let ((a1, b1), (a2, b2)) = (make(0), make(6));
        let mix_a: Vec<f64> = a1.iter().zip(&a2).map(|(p, q)| (t * p * p + (1.0 - t) * q * q).sqrt()).collect();
        let mix_b: Vec<f64> = b1.iter().zip(&b2).map(|(p, q)| t * p + (1.0 - t) * q).collect();
        let series = |a: Vec<f64>, b: Vec<f64>| szego::b_series(&JacobiParams::finite_range(a, b).unwrap(), 14).unwrap();
        let (s1, s2, sm) = (series(a1, b1), series(a2, b2), series(mix_a, mix_b));
        for k in 0..=14 {
            prop_assert!((sm.coeff(k) - (t * s1.coeff(k) + (1.0 - t) * s2.coeff(k))).norm() < 1e-14);
        }
    }

    #[test]
    fn bernstein_szego_ingestion_round_trip(alpha in prop::collection::vec(-0.7..0.7f64, 1..=8)) {
        let coeffs = VerblunskyCoeffs::zero_after_real(&alpha).unwrap();
        let m = opuc::bernstein_szego(&coeffs, alpha.len(), 2048).unwrap();
        let back = opuc::verblunsky_from_measure(&m, alpha.len() + 1).unwrap();
        for k in 0..=alpha.len() {
            let want = alpha.get(k).copied().unwrap_or(0.0);
            prop_assert!((back.alpha(k).unwrap() - want).norm() < 1e-8);
        }
    }

    #[test]
    fn blaschke_is_unimodular_on_circle(zr in 0.0..0.95f64, zt in 0.0..TAU, t in 0.0..TAU) {
        let zeros = [C64::from_polar(zr, zt), c(0.5)];
        let v = jost::blaschke(&zeros, C64::from_polar(1.0, t)).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}

use num_complex::Complex64 as C64;
use opdecay::opuc::{self, VerblunskyCoeffs};
use opdecay::poly;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn coeffs_strategy(max_len: usize, radius: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(
        (0.0..radius, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t)),
        1..=max_len,
    )
}

fn circle(j: usize, g: usize) -> C64 {
    C64::from_polar(1.0, TAU * j as f64 / g as f64)
}

/// Support points and weights of the point measure with coefficients
/// `α_0 … α_{n-1}, ω`, read off the poles and residues of its Carathéodory
/// function `Ψ_{n+1}^* / Φ_{n+1}^*`.
fn popuc_measure_by_residues(alpha: &[C64], omega: C64) -> Vec<(C64, f64)> {
    let coeffs = VerblunskyCoeffs::zero_after(alpha.to_vec()).unwrap();
    let n = alpha.len();
    let phi = opuc::szego_recursion(&coeffs, n).unwrap();
    let psi = opuc::second_kind(&coeffs, n).unwrap();
    let step = |pair: &opuc::CirclePolyPair, sign: f64| {
        let shifted = poly::shift(&pair.monic(), 1);
        poly::add(&pair.monic_star(), &poly::scale(&shifted, -sign * omega))
    };
    let phi_star = step(&phi, 1.0);
    let psi_star = step(&psi, -1.0);
    // F = Ψ*/Φ* = Σ w_j (z_j + z)/(z_j - z); the residue at z_j is -2 w_j z_j.
    poly::roots(&phi_star)
        .unwrap()
        .into_iter()
        .map(|zj| {
            let (_, d) = poly::eval_with_derivative(&phi_star, zj);
            let residue = poly::eval(&psi_star, zj) / d;
            (zj, (-residue / (2.0 * zj)).re)
        })
        .collect()
}

#[test]
fn averaged_popuc_moment_matches_residue_oracle() {
    let coeffs = VerblunskyCoeffs::zero_after_real(&[0.5]).unwrap();
    let omegas = opuc::roots_of_unity(16);
    let (avg, bs) = opuc::popuc_average_check(&coeffs, 1, &omegas, 1).unwrap();
    let oracle: C64 = omegas
        .iter()
        .map(|&w| {
            popuc_measure_by_residues(&[C64::new(0.5, 0.0)], w)
                .iter()
                .map(|(z, m)| m / z)
                .sum::<C64>()
        })
        .sum::<C64>()
        / 16.0;
    assert!((avg - oracle).norm() < 1e-10, "{avg} vs {oracle}");
    assert!((avg - bs).norm() < 1e-10, "{avg} vs {bs}");
}

#[test]
fn caratheodory_of_bernstein_szego_is_psi_star_over_phi_star() {
    let alpha = [
        C64::new(0.3, -0.2),
        C64::new(-0.4, 0.1),
        C64::new(0.2, 0.5),
        C64::new(0.1, 0.0),
        C64::new(-0.3, -0.3),
    ];
    let coeffs = VerblunskyCoeffs::zero_after(alpha.to_vec()).unwrap();
    let m = opuc::bernstein_szego(&coeffs, 5, 4096).unwrap();
    for j in 0..20 {
        let z = C64::from_polar(0.05 + 0.04 * j as f64, 0.7 * j as f64);
        let f = opuc::f_function(&m, z).unwrap();
        let closed = opuc::bernstein_szego_caratheodory(&coeffs, 5, z).unwrap();
        assert!((f - closed).norm() < 1e-9, "z={z}: {f} vs {closed}");
    }
}

#[test]
fn point_mass_caratheodory_is_the_kernel() {
    let m = opuc::CircleMeasure::new(Vec::new(), vec![(0.0, 1.0)]).unwrap();
    let z = C64::new(0.2, -0.4);
    assert!((opuc::f_function(&m, z).unwrap() - (1.0 + z) / (1.0 - z)).norm() < 1e-15);
}

proptest! {
    #[test]
    fn star_identity_holds_coefficientwise(alpha in coeffs_strategy(6, 0.95)) {
        let coeffs = VerblunskyCoeffs::zero_after(alpha.clone()).unwrap();
        let n = alpha.len();
        // Φ_n^* = 1 - Σ_{j<n} α_j z Φ_j
        let mut rhs = vec![C64::new(1.0, 0.0)];
        for (j, a) in alpha.iter().enumerate() {
            let phi_j = opuc::szego_recursion(&coeffs, j).unwrap().monic();
            rhs = poly::add(&rhs, &poly::scale(&poly::shift(&phi_j, 1), -a));
        }
        let lhs = opuc::szego_recursion(&coeffs, n).unwrap().monic_star();
        for k in 0..rhs.len().max(lhs.len()) {
            let (l, r) = (lhs.get(k).copied().unwrap_or_default(), rhs.get(k).copied().unwrap_or_default());
            prop_assert!((l - r).norm() < 1e-12, "coefficient {}: {} vs {}", k, l, r);
        }
    }

    #[test]
    fn phi_and_phi_star_agree_in_modulus_on_circle(alpha in coeffs_strategy(50, 0.9)) {
        let coeffs = VerblunskyCoeffs::zero_after(alpha.clone()).unwrap();
        let pair = opuc::szego_recursion(&coeffs, alpha.len()).unwrap();
        // Horner rounding bound for either polynomial on the circle.
        let size: f64 = pair.phi.iter().map(|c| c.norm()).sum();
        let bound = 4.0 * (alpha.len() + 1) as f64 * f64::EPSILON * size;
        for j in 0..128 {
            let z = circle(j, 128);
            let (a, b) = (poly::eval(&pair.phi, z).norm(), poly::eval(&pair.phi_star, z).norm());
            prop_assert!((a - b).abs() <= bound.max(1e-14), "{} vs {} (bound {})", a, b, bound);
        }
    }

    #[test]
    fn monic_star_bounded_by_product(alpha in coeffs_strategy(20, 0.95)) {
        let coeffs = VerblunskyCoeffs::zero_after(alpha.clone()).unwrap();
        let mut bound = 1.0;
        for (n, a) in std::iter::once(C64::new(0.0, 0.0)).chain(alpha.iter().copied()).enumerate() {
            if n > 0 {
                bound *= 1.0 + a.norm();
            }
            let star = opuc::szego_recursion(&coeffs, n).unwrap().monic_star();
            for r in [0.0, 0.5, 1.0] {
                for j in 0..64 {
                    let v = poly::eval(&star, circle(j, 64) * r).norm();
                    prop_assert!(v <= bound * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn popuc_measure_reproduces_coefficients(alpha in coeffs_strategy(8, 0.9), t in 0.0..TAU) {
        let omega = C64::from_polar(1.0, t);
        let coeffs = VerblunskyCoeffs::zero_after(alpha.clone()).unwrap();
        let measure = opuc::popuc_measure(&coeffs, alpha.len(), omega).unwrap();
        let back = opuc::verblunsky_from_measure(&measure, alpha.len()).unwrap();
        for (k, a) in alpha.iter().enumerate() {
            prop_assert!((back.alpha(k).unwrap() - a).norm() < 1e-9);
        }
    }

    #[test]
    fn popuc_weights_match_residues(alpha in coeffs_strategy(6, 0.8), t in 0.0..TAU) {
        let omega = C64::from_polar(1.0, t);
        let coeffs = VerblunskyCoeffs::zero_after(alpha.clone()).unwrap();
        let measure = opuc::popuc_measure(&coeffs, alpha.len(), omega).unwrap();
        let oracle = popuc_measure_by_residues(&alpha, omega);
        for k in -3i64..=3 {
            let direct: C64 = oracle.iter().map(|(z, m)| z.powi(-k as i32) * m).sum();
            prop_assert!((measure.moment(k) - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn bernstein_szego_matches_low_moments_of_longer_sequences(alpha in coeffs_strategy(5, 0.7), extra in coeffs_strategy(3, 0.7)) {
        let n = alpha.len();
        let short = VerblunskyCoeffs::zero_after(alpha.clone()).unwrap();
        let long = VerblunskyCoeffs::zero_after(alpha.iter().chain(&extra).copied().collect()).unwrap();
        let a = opuc::bernstein_szego(&short, n, 2048).unwrap();
        let b = opuc::bernstein_szego(&long, n + extra.len(), 2048).unwrap();
        for k in -(n as i64)..=(n as i64) {
            prop_assert!((a.moment(k) - b.moment(k)).norm() < 1e-9);
        }
    }
}

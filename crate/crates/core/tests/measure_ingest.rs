use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use opdecay::measure::{self, AcWeight, MeasureSpec, LINE_NODES};
use opdecay::opuc::{self, VerblunskyCoeffs};
use opdecay::szego;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Verblunsky coefficients from trigonometric moments by solving the
/// orthogonality conditions of each monic `Φ_n` as a dense Toeplitz system.
fn alphas_from_moments(moment: impl Fn(i64) -> C64, count: usize) -> Vec<C64> {
    (1..=count)
        .map(|n| {
            let t = DMatrix::from_fn(n, n, |m, j| moment(m as i64 - j as i64));
            let rhs = DVector::from_fn(n, |m, _| -moment(m as i64 - n as i64));
            let p = t.lu().solve(&rhs).unwrap();
            -p[0].conj()
        })
        .collect()
}

fn bernstein_szego_spec(alpha: &[f64]) -> MeasureSpec {
    MeasureSpec::circle(AcWeight::BernsteinSzego {
        alpha: alpha.to_vec(),
        alpha_im: Vec::new(),
    })
}

#[test]
fn bernstein_szego_weight_ingests_to_its_coefficients() {
    let got = measure::ingest_circle(&bernstein_szego_spec(&[0.5]), 6, 256).unwrap();
    assert!((got.alpha(0).unwrap() - c(0.5)).norm() < 1e-12);
    for k in 1..6 {
        assert!(
            got.alpha(k).unwrap().norm() < 1e-12,
            "α_{k} = {}",
            got.alpha(k).unwrap()
        );
    }
}

#[test]
fn one_term_cosine_weight_matches_moment_formula() {
    // w = 1.25 - cos θ normalizes to c_0 = 1, c_{±1} = -0.4.
    let spec = MeasureSpec::circle(AcWeight::CosinePolynomial {
        coefficients: vec![1.25, -1.0],
    });
    let got = measure::ingest_circle(&spec, 8, 256).unwrap();
    let moment = |k: i64| match k.abs() {
        0 => c(1.0),
        1 => c(-0.4),
        _ => c(0.0),
    };
    assert!((got.alpha(0).unwrap() - c(-0.4)).norm() < 1e-12);
    for (k, want) in alphas_from_moments(moment, 8).into_iter().enumerate() {
        assert!(
            (got.alpha(k).unwrap() - want).norm() < 1e-10,
            "α_{k}: {} vs {want}",
            got.alpha(k).unwrap()
        );
    }
}

#[test]
fn sampled_measure_matches_toeplitz_oracle() {
    let spec = MeasureSpec::circle(AcWeight::CosinePolynomial {
        coefficients: vec![2.0, 0.6, -0.5, 0.3],
    });
    let m = measure::circle_measure(&spec, 512).unwrap();
    let got = opuc::verblunsky_from_measure(&m, 6).unwrap();
    for (k, want) in alphas_from_moments(|k| m.moment(k), 6)
        .into_iter()
        .enumerate()
    {
        assert!(
            (got.alpha(k).unwrap() - want).norm() < 1e-10,
            "α_{k}: {} vs {want}",
            got.alpha(k).unwrap()
        );
    }
}

#[test]
fn even_line_weight_has_zero_diagonal() {
    let spec = MeasureSpec::line(AcWeight::CosinePolynomial {
        coefficients: vec![1.0, 0.0, 0.5],
    });
    let p = measure::ingest_line(&spec, 12, LINE_NODES).unwrap();
    for k in 1..=12 {
        assert!(p.b(k).unwrap().abs() < 1e-13, "b_{k} = {}", p.b(k).unwrap());
    }
}

#[test]
fn line_bernstein_szego_matches_geronimus_map() {
    let alpha = [0.5, 0.5, 0.5];
    let line = measure::ingest_line(
        &MeasureSpec::line(AcWeight::BernsteinSzego {
            alpha: alpha.to_vec(),
            alpha_im: Vec::new(),
        }),
        8,
        LINE_NODES,
    )
    .unwrap();
    let mapped = szego::geronimus_map(&VerblunskyCoeffs::zero_after_real(&alpha).unwrap()).unwrap();
    for k in 1..=8 {
        assert!(
            (line.a(k).unwrap() - mapped.a(k).unwrap()).abs() < 1e-6,
            "a_{k}"
        );
        assert!(
            (line.b(k).unwrap() - mapped.b(k).unwrap()).abs() < 1e-6,
            "b_{k}"
        );
    }
}

#[test]
fn line_ingestion_commutes_with_geronimus_map() {
    let weight = AcWeight::CosinePolynomial {
        coefficients: vec![1.0, 0.3, -0.2],
    };
    let line = measure::ingest_line(&MeasureSpec::line(weight.clone()), 6, LINE_NODES).unwrap();
    let circle = measure::ingest_circle(&MeasureSpec::circle(weight), 16, 1024).unwrap();
    // An even weight has real coefficients; drop the rounding residue.
    assert!(circle.stored().iter().all(|a| a.im.abs() < 1e-14));
    let real: Vec<C64> = circle.stored().iter().map(|a| c(a.re)).collect();
    let mapped = szego::geronimus_map(&VerblunskyCoeffs::truncated(real).unwrap()).unwrap();
    for k in 1..=6 {
        assert!(
            (line.a(k).unwrap() - mapped.a(k).unwrap()).abs() < 1e-6,
            "a_{k}"
        );
        assert!(
            (line.b(k).unwrap() - mapped.b(k).unwrap()).abs() < 1e-6,
            "b_{k}"
        );
    }
}

#[test]
fn semicircle_on_circle_is_rejected() {
    assert!(measure::ingest_circle(&MeasureSpec::circle(AcWeight::SemicircleFree), 4, 64).is_err());
}

proptest! {
    #[test]
    fn bernstein_szego_ingestion_round_trip(
        alpha in prop::collection::vec((-0.6..0.6f64, -0.6..0.6f64), 1..5),
    ) {
        let spec = MeasureSpec::circle(AcWeight::BernsteinSzego {
            alpha: alpha.iter().map(|a| a.0).collect(),
            alpha_im: alpha.iter().map(|a| a.1).collect(),
        });
        let n = alpha.len() + 3;
        let got = measure::ingest_circle(&spec, n, 256).unwrap();
        for k in 0..n {
            let want = alpha.get(k).map_or(C64::new(0.0, 0.0), |a| C64::new(a.0, a.1));
            prop_assert!((got.alpha(k).unwrap() - want).norm() < 1e-9, "α_{}: {} vs {}", k, got.alpha(k).unwrap(), want);
        }
    }
}

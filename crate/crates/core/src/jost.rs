//! Jost functions of finite-range Jacobi matrices and the Borel transform of
//! their spectral measures in the Joukowski variable `E = z + 1/z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oprl::{eval_polys, JacobiParams, PointMeasure};
use crate::poly::{self, C64};
use crate::series::TaylorSeries;

/// A Jost function together with its zeros in the disk and the matching
/// eigenvalues `E = z + 1/z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JostData {
    pub u: TaylorSeries,
    pub zeros_in_disk: Vec<C64>,
    pub eigenvalues: Vec<C64>,
}

impl JostData {
    pub fn new(u: TaylorSeries, zeros_in_disk: Vec<C64>) -> Self {
        let eigenvalues = zeros_in_disk.iter().map(|&z| joukowski(z)).collect();
        Self {
            u,
            zeros_in_disk,
            eigenvalues,
        }
    }
}

pub fn joukowski(z: C64) -> C64 {
    z + 1.0 / z
}

/// The root of `z^2 - E z + 1 = 0` with `|z| <= 1`.
pub fn inverse_joukowski(e: C64) -> C64 {
    let s = (e * e - 4.0).sqrt();
    let (z1, z2) = ((e - s) / 2.0, (e + s) / 2.0);
    if z1.norm() <= z2.norm() {
        z1
    } else {
        z2
    }
}

fn jost_params(params: &JacobiParams) -> Result<(usize, JacobiParams)> {
    let ell = params.jost_order().ok_or_else(|| {
        Error::Precondition("the Jost polynomial needs parameters with a free tail".into())
    })?;
    Ok((ell, params.finite_range_cut(ell)?))
}

/// Coefficients of `g_ℓ(z) = z^ℓ (p_ℓ(z + 1/z) - z p_{ℓ-1}(z + 1/z))`, a
/// polynomial of degree at most `2ℓ`, where `ℓ` is the Jost order of `params`.
pub fn jost_polynomial(params: &JacobiParams) -> Result<Vec<C64>> {
    let (ell, cut) = jost_params(params)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    // P_n = z^n p_n(z + 1/z)
    let mut prev = vec![zero];
    let mut cur = vec![one];
    for n in 1..=ell {
        let an = cut.a(n)?;
        let bn = cut.b(n)?;
        let mut next = poly::mul(&[one, C64::new(-bn, 0.0), one], &cur);
        if n >= 2 {
            let a_prev = cut.a(n - 1)?;
            let tail = poly::shift(&prev, 2);
            next = poly::add(&next, &poly::scale(&tail, C64::new(-a_prev, 0.0)));
        }
        prev = cur;
        cur = poly::scale(&next, C64::new(1.0 / an, 0.0));
    }
    let g = if ell == 0 {
        cur
    } else {
        poly::add(&cur, &poly::scale(&poly::shift(&prev, 2), -one))
    };
    // Exact cancellation leaves the top coefficients at zero; drop them.
    Ok(poly::trim(&g, 0.0))
}

/// `g_ℓ` as a Taylor series of order `max(2ℓ, 1)`.
pub fn jost_series(params: &JacobiParams) -> Result<TaylorSeries> {
    let g = jost_polynomial(params)?;
    let (ell, _) = jost_params(params)?;
    TaylorSeries::with_order(g, (2 * ell).max(1))
}

/// Pointwise `g_ℓ(z)` from the orthonormal polynomials; `z = 0` falls back to
/// the polynomial form.
pub fn jost_g_ell(params: &JacobiParams, z: C64) -> Result<C64> {
    let (ell, cut) = jost_params(params)?;
    if ell == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if z.norm() == 0.0 {
        return Ok(jost_polynomial(params)?[0]);
    }
    let ev = eval_polys::<Complex64>(&cut, ell, joukowski(z))?;
    Ok(z.powi(ell as i32) * (ev.p[ell] - z * ev.p[ell - 1]))
}

/// Jost data of finite-range parameters: `g_ℓ` and its zeros inside the disk.
pub fn jost_data(params: &JacobiParams) -> Result<JostData> {
    let g = jost_polynomial(params)?;
    let zeros = if g.len() > 1 {
        poly::roots(&g)?
    } else {
        Vec::new()
    };
    let inside = zeros.into_iter().filter(|z| z.norm() < 1.0).collect();
    Ok(JostData::new(jost_series(params)?, inside))
}

/// `M(z) = ∫ dρ(x) / (z + 1/z - x)` for a finitely supported measure.
/// Near a mass point the error carries the residue of `M` in `z`.
pub fn m_function_point(measure: &PointMeasure, z: C64) -> Result<C64> {
    if z.norm() == 0.0 || z.norm() >= 1.0 {
        return Err(Error::Domain { modulus: z.norm() });
    }
    let e = joukowski(z);
    for (&x, &w) in measure.nodes().iter().zip(measure.weights()) {
        if (e - x).norm() <= 1e-12 {
            let z0 = inverse_joukowski(C64::new(x, 0.0));
            let residue = w / (1.0 - 1.0 / (z0 * z0));
            return Err(Error::Pole {
                z,
                residue: Some(residue),
            });
        }
    }
    Ok(-measure.stieltjes(e))
}

/// `M` for finite-range parameters via the continued fraction
/// `m_k = 1 / (b_{k+1} - E - a_{k+1}^2 m_{k+1})` seeded with the free value
/// `m_ℓ = -z`. The result is rational in `z`, so it also gives the
/// meromorphic continuation outside the disk.
pub fn m_function_finite_range(params: &JacobiParams, z: C64) -> Result<C64> {
    let (ell, cut) = jost_params(params)?;
    if z.norm() == 0.0 {
        return Err(Error::Pole { z, residue: None });
    }
    let e = joukowski(z);
    let mut m = -z;
    for k in (0..ell).rev() {
        let den = cut.b(k + 1)? - e - cut.a(k + 1)?.powi(2) * m;
        if den.norm() < 1e-300 {
            return Err(Error::Pole { z, residue: None });
        }
        m = 1.0 / den;
    }
    Ok(-m)
}

/// Finite Blaschke product `Π (z - z_j) / (1 - conj(z_j) z)`.
pub fn blaschke(zeros: &[C64], z: C64) -> Result<C64> {
    if let Some(bad) = zeros.iter().find(|w| w.norm() >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Blaschke zero {bad} is not inside the disk"
        )));
    }
    Ok(zeros
        .iter()
        .map(|&w| (z - w) / (1.0 - w.conj() * z))
        .product())
}

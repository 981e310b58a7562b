//! Szegő function, the series `S`, `r`, `B`, the map from real Verblunsky
//! coefficients to Jacobi parameters, and coefficient recovery from a measure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hp;
use crate::jost::JostData;
use crate::oprl::JacobiParams;
use crate::opuc::{self, CircleMeasure, VerblunskyCoeffs, VerblunskyTail};
use crate::poly::{self, C64};
use crate::series::{self, LaurentSeries, TaylorSeries};

/// Coefficient changes above this (relative) at the last recursion step
/// trigger a convergence warning.
const CONVERGENCE_TOL: f64 = 1e-12;

/// Taylor coefficients `c_0 … c_n` of `D^{-1} = lim φ_k^*`.
///
/// A zero tail gives the exact polynomial `φ_k^*`; a truncated sequence uses
/// every stored coefficient and warns if the last step still moved the
/// first `n + 1` coefficients.
pub fn dinv_from_alphas(coeffs: &VerblunskyCoeffs, n: usize) -> Result<TaylorSeries> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "series order must be at least 1".into(),
        ));
    }
    let alphas = coeffs.stored();
    let last = opuc::szego_recursion(coeffs, alphas.len())?;
    let mut warning = None;
    if matches!(coeffs.tail(), VerblunskyTail::Truncated(_)) && !alphas.is_empty() {
        let before = opuc::szego_recursion(coeffs, alphas.len() - 1)?;
        let scale = last
            .phi_star
            .iter()
            .take(n + 1)
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let change = (0..=n)
            .map(|k| {
                let a = last.phi_star.get(k).copied().unwrap_or_default();
                let b = before.phi_star.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max);
        if change > CONVERGENCE_TOL * scale {
            warning = Some(format!(
                "φ_k^* coefficients 0..={n} still moved by {change:.3e} at the last available step k = {}",
                alphas.len()
            ));
        }
    }
    Ok(TaylorSeries::with_order(last.phi_star, n)?.with_warning(warning))
}

/// [`dinv_from_alphas`] in `bits`-bit fixed point, rounded to doubles at the end.
/// Tail coefficients far below `1e-16` of the leading one stay accurate.
pub fn dinv_from_alphas_hp(coeffs: &VerblunskyCoeffs, n: usize, bits: u32) -> Result<TaylorSeries> {
    hp::check_bits(bits)?;
    let alphas = hp::to_hp(coeffs.stored(), bits);
    let kappa = hp::kappa(&alphas, bits)?;
    let star: Vec<C64> = hp::monic_phi_star(&alphas, bits)
        .iter()
        .map(|c| c.scale(&kappa).to_c64())
        .collect();
    TaylorSeries::with_order(star, n)
}

/// Szegő function `D` of an absolutely continuous measure from its sampled
/// weight: `D = exp(½ (ĉ_0 + 2 Σ_{k≥1} ĉ_k z^k))` with `ĉ_k` the Fourier
/// coefficients of `log w`.
pub fn d_from_weight(measure: &CircleMeasure, n: usize) -> Result<TaylorSeries> {
    if !measure.point_masses().is_empty() {
        return Err(Error::Precondition(
            "the Szegő function is built from a purely absolutely continuous measure".into(),
        ));
    }
    let w = measure.weight();
    let g = w.len();
    if g < 2 * (n + 1) {
        return Err(Error::Aliasing {
            given: g,
            needed: 2 * (n + 1),
        });
    }
    if let Some((index, &value)) = w.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::SzegoCondition { index, value });
    }
    let logs: Vec<C64> = w.iter().map(|v| C64::new(v.ln(), 0.0)).collect();
    let hat = series::fourier_coefficients(&logs);
    let mut f = Vec::with_capacity(n + 1);
    f.push(C64::new(0.5 * hat[0].re, 0.0));
    f.extend(hat[1..=n].iter().copied());
    TaylorSeries::new(series::series_exp(&f))
}

fn monic_at(coeffs: &VerblunskyCoeffs, k: usize) -> Result<Vec<C64>> {
    Ok(opuc::szego_recursion(coeffs, k)?.monic())
}

fn check_no_point_masses(measure: &CircleMeasure) -> Result<()> {
    if measure.point_masses().is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "coefficient recovery needs a measure without singular part".into(),
        ))
    }
}

/// `α_n = -κ_∞ ∫ conj(Φ_{n+1}) D^{-1} dμ`, with `Φ_{n+1}` obtained from the
/// measure itself and `κ_∞ = D^{-1}(0)`.
pub fn recover_alpha_projection(
    measure: &CircleMeasure,
    dinv: &TaylorSeries,
    n: usize,
) -> Result<C64> {
    check_no_point_masses(measure)?;
    let fitted = opuc::verblunsky_from_measure(measure, n + 1)?;
    let phi = monic_at(&fitted, n + 1)?;
    let kappa_inf = dinv.coeff(0);
    let integral = measure.integrate(|z| poly::eval(&phi, z).conj() * dinv.eval(z));
    Ok(-kappa_inf * integral)
}

/// `α_n = -κ_∞^{-1} κ_n^2 ∫ conj(Φ_n) [D^{-1} - D^{-1}(0)] e^{-iθ} dμ`.
pub fn recover_alpha_tail(measure: &CircleMeasure, dinv: &TaylorSeries, n: usize) -> Result<C64> {
    check_no_point_masses(measure)?;
    let fitted = opuc::verblunsky_from_measure(measure, n)?;
    let phi = monic_at(&fitted, n)?;
    let kappa_n = fitted.kappa(n)?;
    let d0 = dinv.coeff(0);
    if d0.norm() == 0.0 {
        return Err(Error::Degenerate("D^{-1}(0) vanishes".into()));
    }
    let integral = measure.integrate(|z| poly::eval(&phi, z).conj() * (dinv.eval(z) - d0) / z);
    Ok(-kappa_n * kappa_n * integral / d0)
}

/// `S(z) = -Σ_{j≥-1} α_j z^{j+1}` with `α_{-1} = -1`: `c_0 = 1`, `c_j = -α_{j-1}`.
pub fn s_series(coeffs: &VerblunskyCoeffs, n: usize) -> Result<TaylorSeries> {
    let mut c = Vec::with_capacity(n + 1);
    c.push(C64::new(1.0, 0.0));
    for j in 1..=n {
        c.push(-coeffs.alpha(j - 1)?);
    }
    TaylorSeries::new(c)
}

/// Laurent coefficients `|k| <= n` of `r = D^{-1} / conj(D^{-1})` on the
/// circle, from boundary samples on a grid of at least `8(n + 1)` points.
pub fn r_series(dinv: &TaylorSeries, n: usize) -> Result<LaurentSeries> {
    let scale = dinv.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if dinv.coeff(0).norm() <= 1e-14 * scale {
        return Err(Error::Degenerate(
            "D^{-1} has (numerically) zero constant term".into(),
        ));
    }
    let g = (8 * (n + 1))
        .max(4 * dinv.coeffs().len())
        .next_power_of_two();
    let vals = series::boundary_values(dinv.coeffs(), g);
    if let Some(v) = vals.iter().find(|v| v.norm() <= 1e-300) {
        return Err(Error::Degenerate(format!(
            "D^{{-1}} vanishes on the circle (|value| = {})",
            v.norm()
        )));
    }
    let ratio: Vec<C64> = vals.iter().map(|v| v / v.conj()).collect();
    let hat = series::fourier_coefficients(&ratio);
    let coeffs = (-(n as i64)..=(n as i64))
        .map(|k| hat[k.rem_euclid(g as i64) as usize])
        .collect();
    LaurentSeries::new(coeffs, None)
}

fn real_alphas(coeffs: &VerblunskyCoeffs) -> Result<()> {
    if coeffs.is_real() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "this map needs real Verblunsky coefficients".into(),
        ))
    }
}

/// `(b_{n+1}, a_{n+1}^2 - 1)` from `α_{2n} … α_{2n+3}`. The second entry is
/// returned without the leading 1 so that small deviations keep full
/// relative precision.
pub fn geronimus_entry(a0: f64, a1: f64, a2: f64, a3: f64) -> (f64, f64) {
    let b = a0 - a2 - a1 * (a0 + a2);
    let a_sq_minus_one = a1 - a3 - a2 * a2 * (1.0 - a3) * (1.0 + a1) - a3 * a1;
    (b, a_sq_minus_one)
}

/// `(b_{n+1}, a_{n+1}^2 - 1)` for `n = 0..count`, as produced by
/// [`geronimus_map`] before taking square roots.
pub fn geronimus_deviations(coeffs: &VerblunskyCoeffs, count: usize) -> Result<Vec<(f64, f64)>> {
    real_alphas(coeffs)?;
    let al = |i: usize| coeffs.alpha(i).map(|c| c.re);
    (0..count)
        .map(|n| {
            Ok(geronimus_entry(
                al(2 * n)?,
                al(2 * n + 1)?,
                al(2 * n + 2)?,
                al(2 * n + 3)?,
            ))
        })
        .collect()
}

/// Number of Jacobi pairs [`geronimus_map`] produces.
pub fn geronimus_len(coeffs: &VerblunskyCoeffs) -> usize {
    match coeffs.tail() {
        VerblunskyTail::ZeroAfter(k) => k / 2 + 2,
        VerblunskyTail::Truncated(len) => len.saturating_sub(2) / 2,
    }
}

/// Jacobi parameters of the line measure attached to real Verblunsky
/// coefficients. A zero tail maps to a free tail; a truncated sequence of
/// length `L` yields `(L - 2) / 2` parameter pairs.
pub fn geronimus_map(coeffs: &VerblunskyCoeffs) -> Result<JacobiParams> {
    let count = geronimus_len(coeffs);
    let mut a = Vec::with_capacity(count);
    let mut b = Vec::with_capacity(count);
    for (n, (bn, dev)) in geronimus_deviations(coeffs, count)?.into_iter().enumerate() {
        let a_sq = 1.0 + dev;
        if !(a_sq > 0.0) {
            return Err(Error::Degenerate(format!(
                "a_{}^2 = {a_sq} is not positive",
                n + 1
            )));
        }
        a.push(a_sq.sqrt());
        b.push(bn);
    }
    match coeffs.tail() {
        VerblunskyTail::ZeroAfter(_) => {
            while a.last() == Some(&1.0) && b.last() == Some(&0.0) {
                a.pop();
                b.pop();
            }
            JacobiParams::finite_range(a, b)
        }
        VerblunskyTail::Truncated(_) => JacobiParams::truncated(a, b),
    }
}

/// `(1 - |α_0|^2)^{1/2} (1 - α_1)^{1/2}`, the factor taking `D^{-1}` to the
/// Jost function.
pub fn jost_prefactor(coeffs: &VerblunskyCoeffs) -> Result<f64> {
    real_alphas(coeffs)?;
    let a0 = coeffs.alpha(0)?.re;
    let a1 = coeffs.alpha(1)?.re;
    Ok(((1.0 - a0 * a0) * (1.0 - a1)).sqrt())
}

/// Jost function `u = (1 - |α_0|^2)^{1/2} (1 - α_1)^{1/2} D^{-1}` and its
/// zeros in the disk. A zero is kept only if it survives truncating the
/// series by eight orders with relative movement below `1e-6`.
pub fn u_from_d(coeffs: &VerblunskyCoeffs, dinv: &TaylorSeries) -> Result<JostData> {
    let u = dinv.scale(Complex64::new(jost_prefactor(coeffs)?, 0.0));
    let zeros = stable_disk_zeros(u.coeffs())?;
    Ok(JostData::new(u, zeros))
}

/// Zeros inside the unit disk of a truncated series, kept only if they are
/// stable under dropping the last eight coefficients and have small residual.
pub fn stable_disk_zeros(c: &[C64]) -> Result<Vec<C64>> {
    let full = poly::trim(c, 0.0);
    if full.len() <= 1 {
        return Ok(Vec::new());
    }
    let n = full.len() - 1;
    let cut = n.saturating_sub(8).max(n / 2).max(1);
    let coarse = poly::roots(&poly::trim(&full[..=cut], 0.0))?;
    let norm: f64 = full.iter().map(|x| x.norm()).sum();
    let mut out = Vec::new();
    for z in poly::roots(&full)? {
        if z.norm() >= 1.0 {
            continue;
        }
        let stable = coarse
            .iter()
            .any(|w| (w - z).norm() <= 1e-6 * z.norm().max(1e-3));
        let small = poly::eval(&full, z).norm() <= 1e-8 * norm;
        if stable && small {
            out.push(z);
        }
    }
    Ok(out)
}

/// `B(z) = 1 - Σ_{n≥0} [b_{n+1} z^{2n+1} + (a_{n+1}^2 - 1) z^{2n+2}]`.
pub fn b_series(params: &JacobiParams, n: usize) -> Result<TaylorSeries> {
    if n < 2 {
        return Err(Error::InvalidParameter("B needs order at least 2".into()));
    }
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[0] = C64::new(1.0, 0.0);
    for (k, slot) in c.iter_mut().enumerate().skip(1) {
        let idx = k.div_ceil(2);
        *slot = if k % 2 == 1 {
            C64::new(-params.b(idx)?, 0.0)
        } else {
            C64::new(1.0 - params.a(idx)?.powi(2), 0.0)
        };
    }
    TaylorSeries::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn dinv_trivial_and_one_step() {
        let d = dinv_from_alphas(&VerblunskyCoeffs::zero(), 4).unwrap();
        assert_eq!(d.coeffs(), &[c(1.0), c(0.0), c(0.0), c(0.0), c(0.0)]);
        let coeffs = VerblunskyCoeffs::zero_after_real(&[0.5]).unwrap();
        let d = dinv_from_alphas(&coeffs, 3).unwrap();
        let k = 2.0 / 3f64.sqrt();
        assert!((d.coeff(0) - k).norm() < 1e-15 && (d.coeff(1) + k / 2.0).norm() < 1e-15);
        assert!(d.warning().is_none());
    }

    #[test]
    fn dinv_warns_on_slowly_decaying_truncation() {
        let coeffs = VerblunskyCoeffs::constant(c(0.5), 10).unwrap();
        assert!(dinv_from_alphas(&coeffs, 4).unwrap().warning().is_some());
    }

    #[test]
    fn hp_dinv_matches_double() {
        let coeffs = VerblunskyCoeffs::geometric(c(0.5), 2.0, 40).unwrap();
        let lo = dinv_from_alphas(&coeffs, 10).unwrap();
        let hi = dinv_from_alphas_hp(&coeffs, 10, 256).unwrap();
        for k in 0..=10 {
            assert!((lo.coeff(k) - hi.coeff(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn s_series_examples() {
        let s = s_series(&VerblunskyCoeffs::zero(), 3).unwrap();
        assert_eq!(s.coeffs(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let coeffs = VerblunskyCoeffs::geometric(c(0.5), 2.0, 8).unwrap();
        let s = s_series(&coeffs, 4).unwrap();
        assert_eq!(
            s.coeffs(),
            &[c(1.0), c(-0.5), c(-0.25), c(-0.125), c(-0.0625)]
        );
    }

    #[test]
    fn geronimus_constant_half() {
        let coeffs = VerblunskyCoeffs::constant(c(0.5), 12).unwrap();
        let p = geronimus_map(&coeffs).unwrap();
        for n in 1..=5 {
            assert_eq!(p.b(n).unwrap(), -0.5);
            assert_eq!(p.a(n).unwrap(), 0.75);
        }
    }

    #[test]
    fn geronimus_zero_is_free() {
        let p = geronimus_map(&VerblunskyCoeffs::zero()).unwrap();
        assert_eq!(p, JacobiParams::free());
        let p = geronimus_map(&VerblunskyCoeffs::zero_after_real(&[0.5]).unwrap()).unwrap();
        assert_eq!(p, JacobiParams::finite_range(vec![1.0], vec![0.5]).unwrap());
    }

    #[test]
    fn geronimus_rejects_complex() {
        let coeffs = VerblunskyCoeffs::zero_after(vec![C64::new(0.1, 0.1)]).unwrap();
        assert!(matches!(
            geronimus_map(&coeffs),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn u_for_one_step() {
        let coeffs = VerblunskyCoeffs::zero_after_real(&[0.5, 0.0]).unwrap();
        let d = dinv_from_alphas(&coeffs, 4).unwrap();
        let jd = u_from_d(&coeffs, &d).unwrap();
        assert!((jd.u.coeff(0) - 1.0).norm() < 1e-15 && (jd.u.coeff(1) + 0.5).norm() < 1e-15);
        assert!(jd.zeros_in_disk.is_empty());
    }

    #[test]
    fn b_series_examples() {
        let b = b_series(&JacobiParams::free(), 4).unwrap();
        assert_eq!(b.coeffs(), &[c(1.0), c(0.0), c(0.0), c(0.0), c(0.0)]);
        let p = JacobiParams::finite_range(vec![1.0], vec![0.3]).unwrap();
        assert_eq!(
            b_series(&p, 3).unwrap().coeffs(),
            &[c(1.0), c(-0.3), c(0.0), c(0.0)]
        );
        let p = JacobiParams::finite_range(vec![2.0, 1.0], vec![0.3, 0.4]).unwrap();
        assert_eq!(
            b_series(&p, 4).unwrap().coeffs(),
            &[c(1.0), c(-0.3), c(-3.0), c(-0.4), c(0.0)]
        );
    }

    #[test]
    fn d_from_constant_weight() {
        let d = d_from_weight(&CircleMeasure::lebesgue(64).unwrap(), 8).unwrap();
        assert!((d.coeff(0) - 1.0).norm() < 1e-15);
        assert!(d.coeffs()[1..].iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn d_rejects_zero_weight() {
        let mut w = vec![1.0; 64];
        w[3] = 0.0;
        w[4] = 2.0;
        let m = CircleMeasure::new(w, Vec::new()).unwrap();
        assert_eq!(
            d_from_weight(&m, 8),
            Err(Error::SzegoCondition {
                index: 3,
                value: 0.0
            })
        );
    }

    #[test]
    fn r_trivial() {
        let d = TaylorSeries::new(vec![c(1.0), c(0.0)]).unwrap();
        let r = r_series(&d, 4).unwrap();
        assert!((r.coeff(0) - 1.0).norm() < 1e-15);
        assert!((1..=4).all(|k| r.coeff(k).norm() < 1e-15 && r.coeff(-k).norm() < 1e-15));
    }
}

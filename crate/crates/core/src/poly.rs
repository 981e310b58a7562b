//! Dense complex polynomials in the monomial basis, lowest degree first.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Horner evaluation of `sum coeffs[k] z^k`.
pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and first derivative at `z`.
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Star reversal of a degree-`n` polynomial: `z^n conj(P(1/conj z))`.
pub fn reverse_conj(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().rev().map(|c| c.conj()).collect()
}

pub fn mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn add(p: &[C64], q: &[C64]) -> Vec<C64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or_default() + q.get(i).copied().unwrap_or_default())
        .collect()
}

pub fn scale(p: &[C64], s: C64) -> Vec<C64> {
    p.iter().map(|&c| c * s).collect()
}

/// Multiply by `z^k`.
pub fn shift(p: &[C64], k: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); k];
    out.extend_from_slice(p);
    out
}

/// Drop trailing coefficients whose modulus is at most `tol` times the largest one.
pub fn trim(coeffs: &[C64], tol: f64) -> Vec<C64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() <= tol * scale {
        end -= 1;
    }
    coeffs[..end].to_vec()
}

/// All roots of a polynomial: eigenvalues of the companion matrix, then a
/// few Newton steps on the original coefficients.
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let c = trim(coeffs, 0.0);
    if c.is_empty() {
        return Err(Error::Roots("zero polynomial".into()));
    }
    let degree = c.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = c[degree];
    let mut companion = DMatrix::<C64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -c[i] / lead;
    }
    let schur = nalgebra::Schur::try_new(companion, f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Roots(format!(
            "Schur iteration did not converge (degree {degree})"
        ))
    })?;
    let mut zs: Vec<C64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::Roots("no eigenvalues".into()))?
        .iter()
        .copied()
        .collect();
    for z in zs.iter_mut() {
        *z = polish(&c, *z);
    }
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(zs)
}

fn polish(c: &[C64], mut z: C64) -> C64 {
    for _ in 0..4 {
        let (p, dp) = eval_with_derivative(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        // Accept only steps that do not increase the residual.
        if eval(c, next).norm() <= p.norm() {
            z = next;
        } else {
            break;
        }
    }
    z
}

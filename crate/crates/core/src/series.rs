//! Truncated Taylor and Laurent series with complex coefficients, plus the
//! FFT helpers used to move between boundary samples and coefficients.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{self, C64};

/// `c_0 … c_N` about the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    coeffs: Vec<C64>,
    warning: Option<String>,
}

impl TaylorSeries {
    /// Requires at least two coefficients, all finite.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "series order must be at least 1, got {} coefficients",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "series coefficient {i} is not finite"
            )));
        }
        Ok(Self {
            coeffs,
            warning: None,
        })
    }

    /// Pads or truncates `coeffs` to exactly `order + 1` entries.
    pub fn with_order(mut coeffs: Vec<C64>, order: usize) -> Result<Self> {
        coeffs.resize(order + 1, C64::new(0.0, 0.0));
        Self::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn with_warning(mut self, warning: Option<String>) -> Self {
        self.warning = warning;
        self
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        poly::eval(&self.coeffs, z)
    }

    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        poly::eval_with_derivative(&self.coeffs, z)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: poly::scale(&self.coeffs, s),
            warning: self.warning.clone(),
        }
    }

    /// Product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for (i, &a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self {
            coeffs: out,
            warning: self.warning.clone().or_else(|| other.warning.clone()),
        }
    }

    /// Reciprocal series; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if c0.norm() <= 1e-14 * scale || c0.norm() == 0.0 {
            return Err(Error::Degenerate(
                "series has (numerically) zero constant term".into(),
            ));
        }
        let n = self.order();
        let mut q = Vec::with_capacity(n + 1);
        q.push(1.0 / c0);
        for m in 1..=n {
            let acc: C64 = (1..=m).map(|k| self.coeffs[k] * q[m - k]).sum();
            q.push(-acc / c0);
        }
        Ok(Self {
            coeffs: q,
            warning: self.warning.clone(),
        })
    }

    /// First `order + 1` coefficients.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        Self::new(self.coeffs[..(order + 1).min(self.coeffs.len())].to_vec())
    }

    /// Subtract another series coefficientwise (result has the larger order).
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self {
            coeffs,
            warning: self.warning.clone().or_else(|| other.warning.clone()),
        }
    }
}

/// `c_{-N} … c_N`, stored with `c_k` at index `k + N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    coeffs: Vec<C64>,
    annulus: Option<(f64, f64)>,
}

impl LaurentSeries {
    pub fn new(coeffs: Vec<C64>, annulus: Option<(f64, f64)>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "Laurent storage must have odd length 2N+1".into(),
            ));
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "Laurent coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs, annulus })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn annulus(&self) -> Option<(f64, f64)> {
        self.annulus
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> C64 {
        let n = self.order() as i64;
        if k.abs() > n {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// `c_0, c_1, …, c_N`.
    pub fn nonnegative_part(&self) -> Vec<C64> {
        self.coeffs[self.order()..].to_vec()
    }

    /// `c_{-1}, c_{-2}, …, c_{-N}`.
    pub fn negative_part(&self) -> Vec<C64> {
        self.coeffs[..self.order()].iter().rev().copied().collect()
    }

    pub fn eval(&self, z: C64) -> C64 {
        let n = self.order() as i64;
        (-n..=n).map(|k| self.coeff(k) * z.powi(k as i32)).sum()
    }
}

/// Samples `f(e^{2πij/g})` of `f(z) = Σ c_k z^k` for `j = 0..g`.
/// Coefficients past `g` alias onto lower modes, so callers size `g` accordingly.
pub fn boundary_values(coeffs: &[C64], g: usize) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); g];
    for (k, &c) in coeffs.iter().enumerate() {
        buf[k % g] += c;
    }
    FftPlanner::new().plan_fft_inverse(g).process(&mut buf);
    buf
}

/// Fourier coefficients `ĉ_k = (1/g) Σ_j f_j e^{-2πijk/g}`, index `k mod g`.
pub fn fourier_coefficients(samples: &[C64]) -> Vec<C64> {
    let g = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(g).process(&mut buf);
    let inv = 1.0 / g as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// `exp` of a power series with the given coefficients, to the same order.
pub fn series_exp(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    let mut e = Vec::with_capacity(n);
    if n == 0 {
        return e;
    }
    e.push(f[0].exp());
    for m in 1..n {
        let acc: Complex64 = (1..=m).map(|k| f[k] * e[m - k] * k as f64).sum();
        e.push(acc / m as f64);
    }
    e
}

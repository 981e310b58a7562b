//! Orthonormal polynomials on the real line from Jacobi parameters.
//!
//! Indexing follows the usual convention: `a(n)`, `b(n)` for `n >= 1`, and
//! the recursion
//!
//! ```text
//! x p_n(x) = a_{n+1} p_{n+1}(x) + b_{n+1} p_n(x) + a_n p_{n-1}(x),   p_{-1} = 0, p_0 = 1.
//! ```
//!
//! Second-kind polynomials use `q_0 = 0`, `q_1 = 1/a_1` and the same
//! recursion, so the Wronskian `a_n (p_{n-1} q_n - p_n q_{n-1})` is exactly 1.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::eigen::tridiagonal_first_components;
use crate::error::{Error, Result};
use crate::quad;

/// Largest truncation handed to the eigen-oracle.
pub const EIGEN_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobiTail {
    /// `a_n = 1`, `b_n = 0` for `n > k`.
    FreeAfter(usize),
    /// Defined only for `n <= N`.
    Truncated(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    a: Vec<f64>,
    b: Vec<f64>,
    tail: JacobiTail,
    sup_norm: f64,
}

impl JacobiParams {
    /// `a` and `b` hold `a_1, a_2, ...` and `b_1, b_2, ...`.
    pub fn new(mut a: Vec<f64>, mut b: Vec<f64>, tail: JacobiTail) -> Result<Self> {
        let len = match tail {
            JacobiTail::FreeAfter(k) | JacobiTail::Truncated(k) => k,
        };
        if a.len() < len || b.len() < len {
            return Err(Error::InvalidParameter(format!(
                "tail {tail:?} needs {len} entries, got a: {}, b: {}",
                a.len(),
                b.len()
            )));
        }
        a.truncate(len);
        b.truncate(len);
        if let Some((i, v)) = a
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "a_{} = {v} is not a positive real",
                i + 1
            )));
        }
        if let Some((i, v)) = b.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "b_{} = {v} is not finite",
                i + 1
            )));
        }
        let mut sup_norm = a
            .iter()
            .chain(b.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if matches!(tail, JacobiTail::FreeAfter(_)) {
            sup_norm = sup_norm.max(1.0);
        }
        Ok(Self {
            a,
            b,
            tail,
            sup_norm,
        })
    }

    /// The free parameters `a_n = 1`, `b_n = 0`.
    pub fn free() -> Self {
        Self {
            a: Vec::new(),
            b: Vec::new(),
            tail: JacobiTail::FreeAfter(0),
            sup_norm: 1.0,
        }
    }

    /// Finite-range parameters; the shorter of `a`, `b` is padded with free values.
    pub fn finite_range(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Self> {
        let k = a.len().max(b.len());
        a.resize(k, 1.0);
        b.resize(k, 0.0);
        Self::new(a, b, JacobiTail::FreeAfter(k))
    }

    pub fn truncated(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = a.len().min(b.len());
        Self::new(a, b, JacobiTail::Truncated(n))
    }

    pub fn tail(&self) -> JacobiTail {
        self.tail
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Last index at which the parameters are defined, `None` for a free tail.
    pub fn defined_through(&self) -> Option<usize> {
        match self.tail {
            JacobiTail::FreeAfter(_) => None,
            JacobiTail::Truncated(n) => Some(n),
        }
    }

    pub fn a(&self, n: usize) -> Result<f64> {
        self.entry(&self.a, n, 1.0)
    }

    pub fn b(&self, n: usize) -> Result<f64> {
        self.entry(&self.b, n, 0.0)
    }

    fn entry(&self, v: &[f64], n: usize, free: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "Jacobi parameters are indexed from 1".into(),
            ));
        }
        match self.tail {
            JacobiTail::FreeAfter(k) => Ok(if n <= k { v[n - 1] } else { free }),
            JacobiTail::Truncated(len) if n <= len => Ok(v[n - 1]),
            JacobiTail::Truncated(len) => Err(Error::OutOfRange {
                index: n,
                available: len,
            }),
        }
    }

    /// Parameters with `a_ℓ` replaced by 1 and everything past `ℓ` free.
    pub fn finite_range_cut(&self, ell: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(ell);
        let mut b = Vec::with_capacity(ell);
        for n in 1..=ell {
            a.push(if n < ell { self.a(n)? } else { 1.0 });
            b.push(self.b(n)?);
        }
        Self::new(a, b, JacobiTail::FreeAfter(ell))
    }

    /// Smallest `ℓ` such that these finite-range parameters equal their own
    /// `finite_range_cut(ℓ)`.
    pub fn jost_order(&self) -> Option<usize> {
        let JacobiTail::FreeAfter(k) = self.tail else {
            return None;
        };
        if k == 0 {
            return Some(0);
        }
        Some(if self.a[k - 1] == 1.0 { k } else { k + 1 })
    }
}

/// Values `p_0(x) … p_n(x)` and `q_0(x) … q_n(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyEval<T = f64> {
    pub x: T,
    pub p: Vec<T>,
    pub q: Vec<T>,
}

/// Forward three-term recursion for the orthonormal and second-kind polynomials.
/// Generic over the scalar so the same recursion can run in extended precision.
pub fn eval_polys<T>(params: &JacobiParams, n: usize, x: T) -> Result<PolyEval<T>>
where
    T: Clone + Num + From<f64>,
{
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    p.push(T::one());
    q.push(T::zero());
    if n >= 1 {
        let a1 = params.a(1)?;
        let b1 = params.b(1)?;
        p.push((x.clone() - T::from(b1)) / T::from(a1));
        q.push(T::one() / T::from(a1));
    }
    for k in 1..n {
        let ak = T::from(params.a(k)?);
        let ak1 = T::from(params.a(k + 1)?);
        let shifted = x.clone() - T::from(params.b(k + 1)?);
        p.push((shifted.clone() * p[k].clone() - ak.clone() * p[k - 1].clone()) / ak1.clone());
        q.push((shifted * q[k].clone() - ak * q[k - 1].clone()) / ak1);
    }
    Ok(PolyEval { x, p, q })
}

/// `(p_{n-1}, a_n p_n, q_{n-1}, a_n q_n)` using only `a_1..a_{n-1}`, `b_1..b_n`,
/// i.e. only the entries of the `n x n` truncation.
fn last_unnormalized<T>(params: &JacobiParams, n: usize, x: T) -> Result<(T, T, T, T)>
where
    T: Copy + Num + From<f64>,
{
    debug_assert!(n >= 1);
    let ev = eval_polys(params, n - 1, x)?;
    let bn = T::from(params.b(n)?);
    let (p1, q1) = (ev.p[n - 1], ev.q[n - 1]);
    let (ap, aq) = if n >= 2 {
        let an1 = T::from(params.a(n - 1)?);
        (
            (x - bn) * p1 - an1 * ev.p[n - 2],
            (x - bn) * q1 - an1 * ev.q[n - 2],
        )
    } else {
        ((x - bn) * p1, T::one())
    };
    Ok((p1, ap, q1, aq))
}

/// Monic polynomials `P_0..P_n` (characteristic polynomials of the leading
/// truncations) and `Q_0..Q_n` (those of the truncations with the first row
/// and column removed).
pub fn monic_polys(
    params: &JacobiParams,
    n: usize,
    z: Complex64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let one = Complex64::new(1.0, 0.0);
    let mut big_p = vec![one];
    let mut big_q = vec![Complex64::new(0.0, 0.0)];
    if n >= 1 {
        big_p.push(z - params.b(1)?);
        big_q.push(one);
    }
    for k in 1..n {
        let a2 = params.a(k)?.powi(2);
        let bk1 = params.b(k + 1)?;
        big_p.push((z - bk1) * big_p[k] - a2 * big_p[k - 1]);
        big_q.push((z - bk1) * big_q[k] - a2 * big_q[k - 1]);
    }
    Ok((big_p, big_q))
}

/// The `n x n` truncation with `b_n` replaced by `b_n + shift`.
pub fn truncated_matrix(
    params: &JacobiParams,
    n: usize,
    shift: Complex64,
) -> Result<DMatrix<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "truncation size must be at least 1".into(),
        ));
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..=n {
        m[(i - 1, i - 1)] = Complex64::new(params.b(i)?, 0.0);
        if i < n {
            let a = params.a(i)?;
            m[(i - 1, i)] = Complex64::new(a, 0.0);
            m[(i, i - 1)] = Complex64::new(a, 0.0);
        }
    }
    m[(n - 1, n - 1)] += shift;
    Ok(m)
}

/// `<δ_0, (J_n^{(b)} - z)^{-1} δ_0>` from the closed form in `p`, `q`.
pub fn m_n_b(params: &JacobiParams, n: usize, b: Complex64, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "truncation size must be at least 1".into(),
        ));
    }
    let (p1, ap, q1, aq) = last_unnormalized(params, n, z)?;
    let den = ap - b * p1;
    let scale = ap.norm() + (b * p1).norm();
    if den.norm() <= 1e-15 * scale || den.norm() < f64::MIN_POSITIVE {
        return Err(Error::Pole { z, residue: None });
    }
    Ok(-(aq - b * q1) / den)
}

/// Density of the boundary-condition-averaged measure `dν^{(n)}`:
/// `1 / (π (a_n^2 p_n(x)^2 + p_{n-1}(x)^2))`.
pub fn carmona_density(params: &JacobiParams, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    let (p1, ap, _, _) = last_unnormalized(params, n, x)?;
    Ok(1.0 / (PI * (ap * ap + p1 * p1)))
}

fn carmona_scale(params: &JacobiParams) -> f64 {
    1.0 + 2.0 * params.sup_norm()
}

/// `∫ x^l dν^{(n)}(x)` over the whole line; finite only for `l <= 2n - 2`.
pub fn carmona_moment(params: &JacobiParams, n: usize, l: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    if l as usize + 1 >= 2 * n {
        return Err(Error::InvalidParameter(format!(
            "moment {l} of dν^({n}) diverges (finite only up to {})",
            2 * n - 2
        )));
    }
    // Validate the parameter range once so the integrand can unwrap.
    carmona_density(params, n, 0.0)?;
    let s = carmona_scale(params);
    let f = |t: f64| {
        let tan = t.tan();
        let x = s * tan;
        let dens = carmona_density(params, n, x).unwrap_or(0.0);
        x.powi(l as i32) * dens * s * (1.0 + tan * tan)
    };
    let breaks = carmona_breakpoints(params, n, s)?;
    Ok(breaks
        .windows(2)
        .map(|w| quad::integrate(f, w[0], w[1], 1e-14, 1e-13).0)
        .sum())
}

/// Angles `atan(x / s)` at the zeros of `p_n` and `p_{n-1}`, where the
/// density can be sharply peaked, bracketed by `±π/2`.
fn carmona_breakpoints(params: &JacobiParams, n: usize, s: f64) -> Result<Vec<f64>> {
    let mut breaks = vec![-FRAC_PI_2, FRAC_PI_2];
    for m in [n, n - 1] {
        if m > 0 {
            let zeros = spectral_measure_oracle(params, m, 0.0)?;
            breaks.extend(zeros.nodes().iter().map(|x| (x / s).atan()));
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(breaks)
}

/// `∫_{-T}^{T} |x|^l dν^{(n)}(x)`; used to exhibit divergence of high moments.
pub fn carmona_partial_abs_moment(
    params: &JacobiParams,
    n: usize,
    l: u32,
    cutoff: f64,
) -> Result<f64> {
    carmona_density(params, n, 0.0)?;
    let s = carmona_scale(params);
    let edge = (cutoff / s).atan();
    let f = |t: f64| {
        let tan = t.tan();
        let x = s * tan;
        x.abs().powi(l as i32)
            * carmona_density(params, n, x).unwrap_or(0.0)
            * s
            * (1.0 + tan * tan)
    };
    Ok(quad::integrate(f, -edge, edge, 1e-12, 1e-12).0)
}

/// A finitely supported probability measure on the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PointMeasure {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidParameter(
                "nodes and weights must be nonempty and of equal length".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "nodes must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "total mass {total} differs from 1"
            )));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn moment(&self, l: u32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x.powi(l as i32))
            .sum()
    }

    /// `∫ dμ(x) / (x - z)`.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w / (x - z))
            .sum()
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let mut best = 0;
        for (i, n) in self.nodes.iter().enumerate() {
            if (n - x).abs() < (self.nodes[best] - x).abs() {
                best = i;
            }
        }
        best
    }
}

/// Spectral measure of `J_{n;F}` with `b_n` shifted by `shift`: eigenvalues
/// and squared first components of the normalized eigenvectors.
pub fn spectral_measure_oracle(
    params: &JacobiParams,
    n: usize,
    shift: f64,
) -> Result<PointMeasure> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "truncation size must be at least 1".into(),
        ));
    }
    if n > EIGEN_CAP {
        return Err(Error::InvalidParameter(format!(
            "eigen-oracle size {n} exceeds cap {EIGEN_CAP}"
        )));
    }
    let mut diag = (1..=n).map(|i| params.b(i)).collect::<Result<Vec<_>>>()?;
    diag[n - 1] += shift;
    let off = (1..n).map(|i| params.a(i)).collect::<Result<Vec<_>>>()?;
    let (nodes, mut weights) = tridiagonal_first_components(&diag, &off)?;
    // The first components form a unit vector up to rounding.
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    PointMeasure::new(nodes, weights).map_err(|e| Error::Eigen(e.to_string()))
}

/// `S_ℓ(x) = p_ℓ^2 + p_{ℓ-1}^2 - x p_ℓ p_{ℓ-1}` with `a_ℓ` taken to be 1.
pub fn dombrowski_nevai_s(params: &JacobiParams, ell: usize, x: f64) -> Result<f64> {
    if ell == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    let (p1, p, _, _) = last_unnormalized(params, ell, x)?;
    Ok(p * p + p1 * p1 - x * p * p1)
}

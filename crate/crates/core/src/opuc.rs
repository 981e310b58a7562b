//! Orthogonal polynomials on the unit circle from Verblunsky coefficients.
//!
//! Monic recursion:
//!
//! ```text
//! Φ_{n+1}(z)  = z Φ_n(z) - conj(α_n) Φ_n^*(z)
//! Φ_{n+1}^*(z) = Φ_n^*(z) - α_n z Φ_n(z)
//! ```
//!
//! with `φ_n = κ_n Φ_n`, `κ_n = Π_{j<n} ρ_j^{-1}`, `ρ_j = (1 - |α_j|^2)^{1/2}`.
//! Star reversal is done exactly on coefficient arrays.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{self, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerblunskyTail {
    /// `α_n = 0` for `n >= k`.
    ZeroAfter(usize),
    /// Defined only for `n < N`.
    Truncated(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerblunskyCoeffs {
    alpha: Vec<C64>,
    tail: VerblunskyTail,
}

impl VerblunskyCoeffs {
    pub fn new(mut alpha: Vec<C64>, tail: VerblunskyTail) -> Result<Self> {
        let len = match tail {
            VerblunskyTail::ZeroAfter(k) | VerblunskyTail::Truncated(k) => k,
        };
        if alpha.len() < len {
            return Err(Error::InvalidParameter(format!(
                "tail {tail:?} needs {len} coefficients, got {}",
                alpha.len()
            )));
        }
        alpha.truncate(len);
        if let Some((i, a)) = alpha.iter().enumerate().find(|(_, a)| !(a.norm() < 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "|α_{i}| = {} is not inside the unit disk",
                a.norm()
            )));
        }
        Ok(Self { alpha, tail })
    }

    /// `α ≡ 0` (Lebesgue measure).
    pub fn zero() -> Self {
        Self {
            alpha: Vec::new(),
            tail: VerblunskyTail::ZeroAfter(0),
        }
    }

    pub fn zero_after(alpha: Vec<C64>) -> Result<Self> {
        let k = alpha.len();
        Self::new(alpha, VerblunskyTail::ZeroAfter(k))
    }

    pub fn zero_after_real(alpha: &[f64]) -> Result<Self> {
        Self::zero_after(alpha.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn truncated(alpha: Vec<C64>) -> Result<Self> {
        let n = alpha.len();
        Self::new(alpha, VerblunskyTail::Truncated(n))
    }

    /// `α_n = c · r^{-n}` for `n < len`.
    pub fn geometric(c: C64, r: f64, len: usize) -> Result<Self> {
        if !(r > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric ratio R = {r} must exceed 1"
            )));
        }
        Self::truncated((0..len).map(|n| c * r.powi(-(n as i32))).collect())
    }

    /// `α_n = c` for `n < len`.
    pub fn constant(c: C64, len: usize) -> Result<Self> {
        Self::truncated(vec![c; len])
    }

    pub fn tail(&self) -> VerblunskyTail {
        self.tail
    }

    /// The explicitly stored coefficients.
    pub fn stored(&self) -> &[C64] {
        &self.alpha
    }

    pub fn is_real(&self) -> bool {
        self.alpha.iter().all(|a| a.im == 0.0)
    }

    /// Number of coefficients available, `None` when the tail is zero.
    pub fn defined_through(&self) -> Option<usize> {
        match self.tail {
            VerblunskyTail::ZeroAfter(_) => None,
            VerblunskyTail::Truncated(n) => Some(n),
        }
    }

    pub fn alpha(&self, n: usize) -> Result<C64> {
        match self.tail {
            VerblunskyTail::ZeroAfter(k) => Ok(if n < k {
                self.alpha[n]
            } else {
                C64::new(0.0, 0.0)
            }),
            VerblunskyTail::Truncated(len) if n < len => Ok(self.alpha[n]),
            VerblunskyTail::Truncated(len) => Err(Error::OutOfRange {
                index: n,
                available: len,
            }),
        }
    }

    pub fn rho(&self, n: usize) -> Result<f64> {
        Ok((1.0 - self.alpha(n)?.norm_sqr()).sqrt())
    }

    /// `κ_n = Π_{j<n} ρ_j^{-1}`.
    pub fn kappa(&self, n: usize) -> Result<f64> {
        (0..n).try_fold(1.0, |acc, j| Ok(acc / self.rho(j)?))
    }

    /// Limit of `κ_n`; exact for a zero tail, the product over the stored
    /// coefficients otherwise.
    pub fn kappa_inf(&self) -> f64 {
        self.alpha
            .iter()
            .fold(1.0, |acc, a| acc / (1.0 - a.norm_sqr()).sqrt())
    }

    /// Coefficients `α_0 … α_{n-1}` with zeros past a finite tail.
    pub fn take(&self, n: usize) -> Result<Vec<C64>> {
        (0..n).map(|j| self.alpha(j)).collect()
    }
}

/// `φ_n` and `φ_n^*` as coefficient arrays (lowest degree first).
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePolyPair {
    pub phi: Vec<C64>,
    pub phi_star: Vec<C64>,
    pub degree: usize,
    pub kappa: f64,
}

impl CirclePolyPair {
    /// Monic `Φ_n = φ_n / κ_n`.
    pub fn monic(&self) -> Vec<C64> {
        poly::scale(&self.phi, C64::new(1.0 / self.kappa, 0.0))
    }

    pub fn monic_star(&self) -> Vec<C64> {
        poly::scale(&self.phi_star, C64::new(1.0 / self.kappa, 0.0))
    }
}

fn monic_recursion(alphas: &[C64]) -> Vec<C64> {
    let mut big_phi = vec![C64::new(1.0, 0.0)];
    for &a in alphas {
        let star = poly::reverse_conj(&big_phi);
        let mut next = poly::shift(&big_phi, 1);
        for (i, s) in star.iter().enumerate() {
            next[i] -= a.conj() * s;
        }
        big_phi = next;
    }
    big_phi
}

fn pair_from(alphas: &[C64]) -> CirclePolyPair {
    let kappa = alphas
        .iter()
        .fold(1.0, |acc, a| acc / (1.0 - a.norm_sqr()).sqrt());
    let monic = monic_recursion(alphas);
    let phi = poly::scale(&monic, C64::new(kappa, 0.0));
    let phi_star = poly::reverse_conj(&phi);
    CirclePolyPair {
        degree: alphas.len(),
        phi,
        phi_star,
        kappa,
    }
}

/// `(φ_n, φ_n^*)` after `n` Szegő steps.
pub fn szego_recursion(coeffs: &VerblunskyCoeffs, n: usize) -> Result<CirclePolyPair> {
    Ok(pair_from(&coeffs.take(n)?))
}

/// Second-kind pair `(ψ_n, ψ_n^*)`: the recursion with `α_j` replaced by `-α_j`.
pub fn second_kind(coeffs: &VerblunskyCoeffs, n: usize) -> Result<CirclePolyPair> {
    let flipped: Vec<C64> = coeffs.take(n)?.into_iter().map(|a| -a).collect();
    Ok(pair_from(&flipped))
}

/// Paraorthogonal polynomial `z Φ_n - conj(ω) Φ_n^*` and its zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Popuc {
    pub coeffs: Vec<C64>,
    pub zeros: Vec<C64>,
}

fn check_unimodular(omega: C64) -> Result<()> {
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "|ω| = {} is not 1",
            omega.norm()
        )));
    }
    Ok(())
}

pub fn popuc(coeffs: &VerblunskyCoeffs, n: usize, omega: C64) -> Result<Popuc> {
    check_unimodular(omega)?;
    let pair = szego_recursion(coeffs, n)?;
    let monic = pair.monic();
    let star = pair.monic_star();
    let mut c = poly::shift(&monic, 1);
    for (i, s) in star.iter().enumerate() {
        c[i] -= omega.conj() * s;
    }
    let zeros = poly::roots(&c)?;
    Ok(Popuc { coeffs: c, zeros })
}

/// `e^{2πik/m}` for `k = 0..m`.
pub fn roots_of_unity(m: usize) -> Vec<C64> {
    (0..m)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
        .collect()
}

/// A probability measure on the circle: an absolutely continuous part sampled
/// on a uniform grid (density with respect to `dθ/2π`) and finitely many point
/// masses given as `(θ, mass)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleMeasure {
    weight: Vec<f64>,
    point_masses: Vec<(f64, f64)>,
}

impl CircleMeasure {
    /// An empty `weight` means a purely atomic measure.
    pub fn new(weight: Vec<f64>, point_masses: Vec<(f64, f64)>) -> Result<Self> {
        let g = weight.len();
        if g > 0 && !g.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size {g} is not a power of two"
            )));
        }
        if let Some((i, w)) = weight
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "weight sample {i} = {w} is negative or not finite"
            )));
        }
        if point_masses
            .iter()
            .any(|(t, m)| !(t.is_finite() && m.is_finite() && *m > 0.0))
        {
            return Err(Error::InvalidParameter(
                "point masses must be positive with finite angles".into(),
            ));
        }
        let m = Self {
            weight,
            point_masses,
        };
        let total = m.total_mass();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "total mass {total} differs from 1"
            )));
        }
        Ok(m)
    }

    /// Lebesgue measure `dθ/2π` on a grid of size `g`.
    pub fn lebesgue(g: usize) -> Result<Self> {
        Self::new(vec![1.0; g], Vec::new())
    }

    pub fn grid_size(&self) -> usize {
        self.weight.len()
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn point_masses(&self) -> &[(f64, f64)] {
        &self.point_masses
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.weight.len() as f64
    }

    pub fn total_mass(&self) -> f64 {
        let g = self.weight.len().max(1) as f64;
        self.weight.iter().sum::<f64>() / g + self.point_masses.iter().map(|(_, m)| m).sum::<f64>()
    }

    /// Quadrature nodes `e^{iθ}` with their masses, grid first.
    pub fn nodes(&self) -> Vec<(C64, f64)> {
        let g = self.weight.len() as f64;
        let grid = self
            .weight
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(j, w)| (C64::from_polar(1.0, self.theta(j)), w / g));
        grid.chain(
            self.point_masses
                .iter()
                .map(|&(t, m)| (C64::from_polar(1.0, t), m)),
        )
        .collect()
    }

    /// `∫ f(e^{iθ}) dμ(θ)`, periodic trapezoid rule on the sampled part.
    pub fn integrate<F: Fn(C64) -> C64>(&self, f: F) -> C64 {
        let g = self.weight.len();
        let mut acc = C64::new(0.0, 0.0);
        for (j, &w) in self.weight.iter().enumerate() {
            if w != 0.0 {
                acc += f(C64::from_polar(1.0, self.theta(j))) * w;
            }
        }
        if g > 0 {
            acc /= g as f64;
        }
        for &(t, m) in &self.point_masses {
            acc += f(C64::from_polar(1.0, t)) * m;
        }
        acc
    }

    /// Trigonometric moment `∫ e^{-ikθ} dμ(θ)`.
    pub fn moment(&self, k: i64) -> C64 {
        self.integrate(|z| z.powi(-(k as i32)))
    }
}

/// The point measure carried by the zeros of a paraorthogonal polynomial:
/// the measure with Verblunsky coefficients `α_0 … α_{n-1}, ω`.
/// Weights are Christoffel numbers `1 / Σ_{k<=n} |φ_k(ζ)|^2`.
pub fn popuc_measure(coeffs: &VerblunskyCoeffs, n: usize, omega: C64) -> Result<CircleMeasure> {
    let p = popuc(coeffs, n, omega)?;
    let alphas = coeffs.take(n)?;
    let phis: Vec<Vec<C64>> = (0..=n).map(|k| pair_from(&alphas[..k]).phi).collect();
    let mut masses: Vec<(f64, f64)> = p
        .zeros
        .iter()
        .map(|&z| {
            let k: f64 = phis.iter().map(|ph| poly::eval(ph, z).norm_sqr()).sum();
            (z.arg(), 1.0 / k)
        })
        .collect();
    let total: f64 = masses.iter().map(|(_, m)| m).sum();
    masses.iter_mut().for_each(|(_, m)| *m /= total);
    CircleMeasure::new(Vec::new(), masses)
}

/// First `n` Verblunsky coefficients of a sampled measure.
///
/// The monic polynomials are tracked by their values at the quadrature nodes;
/// each step picks `α_k` so that `Φ_{k+1}` is orthogonal to the constants,
/// i.e. `conj(α_k) = ∫ z Φ_k dμ / ‖Φ_k‖^2`.
pub fn verblunsky_from_measure(measure: &CircleMeasure, n: usize) -> Result<VerblunskyCoeffs> {
    let nodes = measure.nodes();
    let mut phi: Vec<C64> = vec![C64::new(1.0, 0.0); nodes.len()];
    let mut star = phi.clone();
    let mut alphas = Vec::with_capacity(n);
    for k in 0..n {
        let mut norm = 0.0;
        let mut moment = C64::new(0.0, 0.0);
        for ((z, m), p) in nodes.iter().zip(&phi) {
            norm += m * p.norm_sqr();
            moment += z * p * m;
        }
        if !(norm > 1e-300) {
            return Err(Error::Degenerate(format!(
                "measure is supported on fewer than {} points",
                k + 1
            )));
        }
        let a = (moment / norm).conj();
        if !(a.norm() < 1.0 - 1e-14) {
            return Err(Error::Degenerate(format!(
                "|α_{k}| = {} reached 1: the sampled measure has too few points for {n} coefficients",
                a.norm()
            )));
        }
        for ((z, _), (p, s)) in nodes.iter().zip(phi.iter_mut().zip(star.iter_mut())) {
            let (p0, s0) = (*p, *s);
            *p = z * p0 - a.conj() * s0;
            *s = s0 - a * z * p0;
        }
        alphas.push(a);
    }
    VerblunskyCoeffs::truncated(alphas)
}

/// Bernstein–Szegő measure `dθ / (2π |φ_n(e^{iθ})|^2)` sampled on at least
/// `g` points. The grid doubles until the sampled mass is within 1e-12 of 1.
pub fn bernstein_szego(coeffs: &VerblunskyCoeffs, n: usize, g: usize) -> Result<CircleMeasure> {
    if !g.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "grid size {g} is not a power of two"
        )));
    }
    let pair = szego_recursion(coeffs, n)?;
    let mut g = g;
    loop {
        let weight: Vec<f64> = (0..g)
            .map(|j| {
                let z = C64::from_polar(1.0, 2.0 * PI * j as f64 / g as f64);
                1.0 / poly::eval(&pair.phi, z).norm_sqr()
            })
            .collect();
        // The exact mass is 1; the sampled mass converges at the same
        // geometric rate as the low moments.
        let mean = weight.iter().sum::<f64>() / g as f64;
        if (mean - 1.0).abs() < 1e-12 {
            return CircleMeasure::new(weight.iter().map(|w| w / mean).collect(), Vec::new());
        }
        if g >= MAX_GRID {
            return Err(Error::Precondition(format!(
                "weight not resolved on {g} points (sampled mass {mean}); φ_n has zeros too close to the circle"
            )));
        }
        g *= 2;
    }
}

/// Largest grid the sampling routines refine to.
pub const MAX_GRID: usize = 1 << 22;

/// Starting grid size used internally when Bernstein–Szegő moments are needed.
pub fn default_grid_for(n: usize) -> usize {
    (16 * (n + 1)).next_power_of_two().max(1024)
}

/// Average over `omegas` of the `k`-th moment of the paraorthogonal point
/// measures, paired with the `k`-th moment of the Bernstein–Szegő measure.
pub fn popuc_average_check(
    coeffs: &VerblunskyCoeffs,
    n: usize,
    omegas: &[C64],
    k: i64,
) -> Result<(C64, C64)> {
    let needed = 2 * n + 2;
    if omegas.len() < needed {
        return Err(Error::Aliasing {
            given: omegas.len(),
            needed,
        });
    }
    if k.unsigned_abs() as usize > n {
        return Err(Error::InvalidParameter(format!(
            "moment order {k} exceeds n = {n}"
        )));
    }
    let mut avg = C64::new(0.0, 0.0);
    for &w in omegas {
        avg += popuc_measure(coeffs, n, w)?.moment(k);
    }
    avg /= omegas.len() as f64;
    let bs = bernstein_szego(coeffs, n, default_grid_for(n))?.moment(k);
    Ok((avg, bs))
}

/// Carathéodory function `∫ (e^{iθ} + z)/(e^{iθ} - z) dμ(θ)`.
pub fn f_function(measure: &CircleMeasure, z: C64) -> Result<C64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain { modulus: z.norm() });
    }
    Ok(measure.integrate(|e| (e + z) / (e - z)))
}

/// `ψ_n^*(z) / φ_n^*(z)`, the Carathéodory function of the Bernstein–Szegő
/// measure in closed form.
pub fn bernstein_szego_caratheodory(coeffs: &VerblunskyCoeffs, n: usize, z: C64) -> Result<C64> {
    let phi = szego_recursion(coeffs, n)?;
    let psi = second_kind(coeffs, n)?;
    Ok(poly::eval(&psi.phi_star, z) / poly::eval(&phi.phi_star, z))
}

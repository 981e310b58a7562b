//! User-described measures on the circle or on `[-2, 2]`, and their
//! conversion to recursion coefficients.
//!
//! Line weights are tied to circle weights by `x = 2 cos θ` with
//! `f(x) ∝ (4 - x^2)^{1/2} w(θ)`, so every analytic family is defined once on
//! the circle and transported.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::joukowski;
use crate::oprl::{JacobiParams, PointMeasure};
use crate::opuc::{self, CircleMeasure, VerblunskyCoeffs};
use crate::poly::{self, C64};
use crate::quad;

/// Size of the reference free matrix whose Gauss rule discretizes line weights.
pub const LINE_NODES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Circle,
    Line,
}

/// Absolutely continuous part of a measure, before normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AcWeight {
    /// Circle: `w ≡ 1`. Line: `f ≡ 1/4` on `[-2, 2]`.
    Uniform,
    /// `w = 1 / |φ_n(e^{iθ})|^2` for the listed coefficients.
    BernsteinSzego {
        alpha: Vec<f64>,
        #[serde(default)]
        alpha_im: Vec<f64>,
    },
    /// `w(θ) = c_0 + Σ_{k≥1} c_k cos kθ`.
    CosinePolynomial { coefficients: Vec<f64> },
    /// Line only: `f(x) = (2π)^{-1} (4 - x^2)^{1/2}`.
    SemicircleFree,
    /// Circle only: `w` sampled at `θ_j = 2πj / G`, `G` a power of two.
    Samples { values: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointMass {
    /// Angle `θ` for circle measures, position `x` for line measures.
    pub location: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    pub ac_weight: Option<AcWeight>,
    #[serde(default)]
    pub point_masses: Vec<PointMass>,
    /// Mass given to the absolutely continuous part; defaults to
    /// `1 - Σ point masses` so the total is 1.
    pub normalization: Option<f64>,
}

impl MeasureSpec {
    pub fn circle(ac_weight: AcWeight) -> Self {
        Self {
            kind: MeasureKind::Circle,
            ac_weight: Some(ac_weight),
            point_masses: Vec::new(),
            normalization: None,
        }
    }

    pub fn line(ac_weight: AcWeight) -> Self {
        Self {
            kind: MeasureKind::Line,
            ac_weight: Some(ac_weight),
            point_masses: Vec::new(),
            normalization: None,
        }
    }

    fn ac_mass(&self) -> Result<f64> {
        let atoms: f64 = self.point_masses.iter().map(|p| p.mass).sum();
        if self
            .point_masses
            .iter()
            .any(|p| !(p.mass > 0.0 && p.location.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "point masses need positive mass and a finite location".into(),
            ));
        }
        let ac = match (&self.ac_weight, self.normalization) {
            (None, None) => 0.0,
            (None, Some(_)) => {
                return Err(Error::InvalidParameter(
                    "normalization given without an ac_weight".into(),
                ))
            }
            (Some(_), Some(c)) => c,
            (Some(_), None) => 1.0 - atoms,
        };
        if (ac + atoms - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "total mass {} differs from 1",
                ac + atoms
            )));
        }
        if ac < 0.0 || (self.ac_weight.is_some() && ac == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "absolutely continuous mass {ac} must be positive"
            )));
        }
        Ok(ac)
    }

    fn expect_kind(&self, kind: MeasureKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "expected a {kind:?} measure, got {:?}",
                self.kind
            )))
        }
    }
}

impl AcWeight {
    /// Unnormalized circle density at angle `θ`.
    fn circle_density(&self, phi: Option<&[C64]>, theta: f64) -> Result<f64> {
        match self {
            AcWeight::Uniform => Ok(1.0),
            AcWeight::BernsteinSzego { .. } => {
                let phi = phi.expect("polynomial prepared by caller");
                Ok(1.0 / poly::eval(phi, C64::from_polar(1.0, theta)).norm_sqr())
            }
            AcWeight::CosinePolynomial { coefficients } => Ok(coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| c * (k as f64 * theta).cos())
                .sum()),
            AcWeight::SemicircleFree => Err(Error::InvalidParameter(
                "semicircle-free is a line weight".into(),
            )),
            AcWeight::Samples { .. } => unreachable!("samples are handled directly"),
        }
    }

    fn phi(&self) -> Result<Option<Vec<C64>>> {
        let AcWeight::BernsteinSzego { alpha, alpha_im } = self else {
            return Ok(None);
        };
        if !alpha_im.is_empty() && alpha_im.len() != alpha.len() {
            return Err(Error::InvalidParameter(
                "alpha_im must match alpha in length".into(),
            ));
        }
        let coeffs: Vec<C64> = alpha
            .iter()
            .enumerate()
            .map(|(i, &re)| C64::new(re, alpha_im.get(i).copied().unwrap_or(0.0)))
            .collect();
        let vc = VerblunskyCoeffs::zero_after(coeffs)?;
        Ok(Some(opuc::szego_recursion(&vc, vc.stored().len())?.phi))
    }
}

/// Sample a circle-kind spec on `g` grid points.
pub fn circle_measure(spec: &MeasureSpec, g: usize) -> Result<CircleMeasure> {
    spec.expect_kind(MeasureKind::Circle)?;
    let ac = spec.ac_mass()?;
    let masses: Vec<(f64, f64)> = spec
        .point_masses
        .iter()
        .map(|p| (p.location.rem_euclid(2.0 * PI), p.mass))
        .collect();
    let Some(weight) = &spec.ac_weight else {
        return CircleMeasure::new(Vec::new(), masses);
    };
    let raw: Vec<f64> = match weight {
        AcWeight::Samples { values } => {
            if !values.len().is_power_of_two() || values.len() < 4 {
                return Err(Error::InvalidParameter(format!(
                    "{} samples: need a power of two, at least 4",
                    values.len()
                )));
            }
            values.clone()
        }
        AcWeight::SemicircleFree => {
            return Err(Error::InvalidParameter(
                "semicircle-free is a line weight".into(),
            ))
        }
        other => {
            if !g.is_power_of_two() {
                return Err(Error::InvalidParameter(format!(
                    "grid size {g} is not a power of two"
                )));
            }
            let phi = other.phi()?;
            (0..g)
                .map(|j| other.circle_density(phi.as_deref(), 2.0 * PI * j as f64 / g as f64))
                .collect::<Result<_>>()?
        }
    };
    if let Some((i, v)) = raw
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::InvalidParameter(format!(
            "weight sample {i} = {v} is negative or not finite"
        )));
    }
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::InvalidParameter("weight integrates to zero".into()));
    }
    CircleMeasure::new(raw.iter().map(|v| v * ac / mean).collect(), masses)
}

/// First `n` Verblunsky coefficients of a circle-kind spec sampled on at
/// least `g` points. Closed-form weights are resampled on doubled grids until
/// successive coefficient sets agree to 1e-10, about the rounding floor for
/// weights with poles near the circle.
pub fn ingest_circle(spec: &MeasureSpec, n: usize, g: usize) -> Result<VerblunskyCoeffs> {
    let m = circle_measure(spec, g)?;
    if m.grid_size() == 0 {
        return Err(Error::Precondition(
            "point-mass-only measures are excluded from ingestion".into(),
        ));
    }
    let mut coeffs = opuc::verblunsky_from_measure(&m, n)?;
    if matches!(spec.ac_weight, Some(AcWeight::Samples { .. })) {
        return Ok(coeffs);
    }
    let mut g = g;
    loop {
        if g >= opuc::MAX_GRID {
            return Err(Error::Precondition(format!(
                "coefficients did not settle by grid size {g}"
            )));
        }
        g *= 2;
        let next = opuc::verblunsky_from_measure(&circle_measure(spec, g)?, n)?;
        let change = coeffs
            .stored()
            .iter()
            .zip(next.stored())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        coeffs = next;
        if change < 1e-10 {
            return Ok(coeffs);
        }
    }
}

/// A line measure: density on `[-2, 2]` plus finitely many atoms.
#[derive(Clone, Debug)]
pub struct LineMeasure {
    weight: Option<AcWeight>,
    phi: Option<Vec<C64>>,
    /// Multiplies the raw density so the a.c. part has the requested mass.
    scale: f64,
    atoms: Vec<(f64, f64)>,
}

impl LineMeasure {
    pub fn from_spec(spec: &MeasureSpec) -> Result<Self> {
        spec.expect_kind(MeasureKind::Line)?;
        let ac = spec.ac_mass()?;
        let mut atoms: Vec<(f64, f64)> = spec
            .point_masses
            .iter()
            .map(|p| (p.location, p.mass))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let Some(weight) = spec.ac_weight.clone() else {
            return Ok(Self {
                weight: None,
                phi: None,
                scale: 0.0,
                atoms,
            });
        };
        if matches!(weight, AcWeight::Samples { .. }) {
            return Err(Error::InvalidParameter(
                "sampled weights are only supported on the circle".into(),
            ));
        }
        let phi = weight.phi()?;
        let mut lm = Self {
            weight: Some(weight),
            phi,
            scale: 1.0,
            atoms,
        };
        let total = lm.ac_integral(|_| 1.0);
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "line weight integrates to {total}"
            )));
        }
        lm.scale = ac / total;
        Ok(lm)
    }

    /// Density `f(x)` of the absolutely continuous part.
    pub fn density(&self, x: f64) -> f64 {
        if !(-2.0..=2.0).contains(&x) {
            return 0.0;
        }
        self.scale * self.raw_density(x)
    }

    fn raw_density(&self, x: f64) -> f64 {
        let theta = (x / 2.0).clamp(-1.0, 1.0).acos();
        self.raw_density_at_angle(theta, theta.sin())
    }

    /// Raw density at `x = 2 cos θ`, with `sin θ` supplied by the caller so
    /// that endpoint evaluations avoid cancellation in `4 - x^2`.
    fn raw_density_at_angle(&self, theta: f64, sin_theta: f64) -> f64 {
        let Some(w) = &self.weight else { return 0.0 };
        let s = 2.0 * sin_theta;
        match w {
            AcWeight::Uniform => 0.25,
            AcWeight::SemicircleFree => s / (2.0 * PI),
            other => {
                s * other
                    .circle_density(self.phi.as_deref(), theta)
                    .unwrap_or(f64::NAN)
            }
        }
    }

    /// `∫ g(x) f(x) dx` over `[-2, 2]` with `x = 2 cos θ`.
    fn ac_integral<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let h = |t: f64| {
            let x = 2.0 * t.cos();
            g(x) * self.scale * self.raw_density_at_angle(t, t.sin()) * 2.0 * t.sin()
        };
        quad::integrate(h, 0.0, PI, 1e-14, 1e-13).0
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Check that `∫ f(x) / (4 - x^2) dx` is finite near both endpoints.
    pub fn check_endpoint_integrability(&self) -> Result<()> {
        if self.weight.is_none() {
            return Ok(());
        }
        // In θ the integrand is f(2 cos θ) / (2 sin θ); substitute θ = e^s.
        for (endpoint, flip) in [(2.0, false), (-2.0, true)] {
            let piece = |lo: f64, hi: f64| {
                let h = |s: f64| {
                    let t = s.exp();
                    let theta = if flip { PI - t } else { t };
                    self.scale * self.raw_density_at_angle(theta, t.sin()) / (2.0 * t.sin()) * t
                };
                quad::integrate(h, lo.ln(), hi.ln(), 1e-300, 1e-8).0
            };
            let near = piece(1e-6, 1e-3);
            let nearer = piece(1e-9, 1e-6);
            if nearer > 1e-12 && nearer > 0.5 * near {
                return Err(Error::Integrability {
                    endpoint,
                    detail: format!(
                        "∫ f/(4-x²) keeps growing toward the endpoint ({near:.3e} then {nearer:.3e} per three decades)"
                    ),
                });
            }
        }
        Ok(())
    }

    /// Gauss-type discretization: nodes and weights of the free matrix of size
    /// `nodes`, reweighted by `f / f_free`, plus the atoms.
    pub fn discretize(&self, nodes: usize) -> Result<PointMeasure> {
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(nodes + self.atoms.len());
        if self.weight.is_some() {
            let h = PI / (nodes as f64 + 1.0);
            let mut ac = Vec::with_capacity(nodes);
            for k in 1..=nodes {
                let t = k as f64 * h;
                let x = 2.0 * t.cos();
                let lam = 2.0 / (nodes as f64 + 1.0) * t.sin().powi(2);
                let free = t.sin() / PI; // (2π)^{-1} (4 - x^2)^{1/2}
                ac.push((x, lam * self.density(x) / free));
            }
            let total: f64 = ac.iter().map(|p| p.1).sum();
            let target = self.scale * self.raw_mass();
            ac.iter_mut().for_each(|p| p.1 *= target / total);
            pts.extend(ac);
        }
        pts.extend(self.atoms.iter().copied());
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for (x, w) in pts {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        let total: f64 = merged.iter().map(|p| p.1).sum();
        let (xs, ws): (Vec<f64>, Vec<f64>) =
            merged.into_iter().map(|(x, w)| (x, w / total)).unzip();
        PointMeasure::new(xs, ws)
    }

    fn raw_mass(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.ac_integral(|_| 1.0) / self.scale
        }
    }

    /// `M(z) = ∫ dρ(x) / (z + 1/z - x)` for `0 < |z| < 1`.
    pub fn m_function(&self, z: C64) -> Result<C64> {
        if z.norm() == 0.0 || z.norm() >= 1.0 {
            return Err(Error::Domain { modulus: z.norm() });
        }
        let e = joukowski(z);
        let mut acc = C64::new(0.0, 0.0);
        for &(x, m) in &self.atoms {
            if (e - x).norm() <= 1e-12 {
                let z0 = crate::jost::inverse_joukowski(C64::new(x, 0.0));
                return Err(Error::Pole {
                    z,
                    residue: Some(m / (1.0 - 1.0 / (z0 * z0))),
                });
            }
            acc += m / (e - x);
        }
        if self.weight.is_some() {
            let re = self.ac_integral(|x| (1.0 / (e - x)).re);
            let im = self.ac_integral(|x| (1.0 / (e - x)).im);
            acc += Complex64::new(re, im);
        }
        Ok(acc)
    }
}

/// Recursion coefficients `a_1..a_n`, `b_1..b_n` of a discrete measure by the
/// Stieltjes procedure.
pub fn stieltjes(measure: &PointMeasure, n: usize) -> Result<JacobiParams> {
    let xs = measure.nodes();
    let ws = measure.weights();
    if n >= xs.len() {
        return Err(Error::Degenerate(format!(
            "{} support points cannot carry {n} recursion steps",
            xs.len()
        )));
    }
    let mut prev = vec![0.0; xs.len()];
    let mut cur = vec![1.0; xs.len()];
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut a_prev = 0.0;
    for k in 1..=n {
        let bk: f64 = xs
            .iter()
            .zip(ws)
            .zip(&cur)
            .map(|((x, w), p)| w * x * p * p)
            .sum();
        let next: Vec<f64> = xs
            .iter()
            .zip(cur.iter().zip(&prev))
            .map(|(x, (p, q))| (x - bk) * p - a_prev * q)
            .collect();
        let ak = next
            .iter()
            .zip(ws)
            .map(|(r, w)| w * r * r)
            .sum::<f64>()
            .sqrt();
        if !(ak > 1e-300) {
            return Err(Error::Degenerate(format!(
                "recursion broke down at step {k}"
            )));
        }
        b.push(bk);
        a.push(ak);
        prev = cur;
        cur = next.iter().map(|r| r / ak).collect();
        a_prev = ak;
    }
    JacobiParams::truncated(a, b)
}

/// Jacobi parameters `a_1..a_n`, `b_1..b_n` of a line-kind spec.
pub fn ingest_line(spec: &MeasureSpec, n: usize, nodes: usize) -> Result<JacobiParams> {
    let lm = LineMeasure::from_spec(spec)?;
    lm.check_endpoint_integrability()?;
    stieltjes(&lm.discretize(nodes)?, n)
}

//! Decay-rate and radius-of-convergence estimation, verification reports for
//! the decay/analyticity correspondences, canonical weights, product sets
//! and a Padé pole probe.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hp::{self, Fixed, HpComplex};
use crate::jost::{self, joukowski};
use crate::oprl::{spectral_measure_oracle, JacobiParams};
use crate::opuc::VerblunskyCoeffs;
use crate::poly::{self, C64};
use crate::series::{LaurentSeries, TaylorSeries};
use crate::szego;

/// Coefficients below this modulus are left out of regressions.
pub const UNDERFLOW_FLOOR: f64 = 1e-280;
/// Radii above this are reported as infinite.
pub const INFINITE_RADIUS: f64 = 1e6;
/// Fewest usable points for a finite estimate to count as conclusive.
pub const MIN_USABLE_POINTS: usize = 8;

fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn ser_map<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &Num(*v))?;
    }
    map.end()
}

struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_f64(&self.0, s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMethod {
    CauchyHadamardRegression,
    Ratio,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// `f64::INFINITY` when the coefficients vanish or decay faster than the sentinel.
    #[serde(serialize_with = "ser_f64")]
    pub radius: f64,
    pub window: (usize, usize),
    #[serde(serialize_with = "ser_f64")]
    pub fit_residual: f64,
    pub points_used: usize,
    pub method: RadiusMethod,
}

impl RadiusEstimate {
    pub fn is_infinite(&self) -> bool {
        self.radius.is_infinite()
    }

    /// A finite radius from too few points is not trusted.
    pub fn is_conclusive(&self) -> bool {
        self.is_infinite() || self.points_used >= MIN_USABLE_POINTS
    }
}

/// Default window `[n/2, n]` for a sequence with last index `n`.
pub fn default_window(n: usize) -> (usize, usize) {
    (n / 2, n)
}

/// `R` with `R^{-1} ≈ limsup |c_n|^{1/n}`, from a least-squares fit of
/// `log |c_n|` against `n` over the inclusive `window`.
pub fn decay_rate(seq: &[C64], window: (usize, usize)) -> Result<RadiusEstimate> {
    let (lo, hi) = window;
    if hi >= seq.len() || lo > hi {
        return Err(Error::InvalidParameter(format!(
            "window [{lo}, {hi}] does not fit a sequence of length {}",
            seq.len()
        )));
    }
    if hi - lo + 1 < MIN_USABLE_POINTS {
        return Err(Error::InvalidParameter(format!(
            "window [{lo}, {hi}] is shorter than {MIN_USABLE_POINTS}"
        )));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&n| seq[n].norm() >= UNDERFLOW_FLOOR)
        .map(|n| (n as f64, seq[n].norm().ln()))
        .collect();
    let infinite = |points_used| RadiusEstimate {
        radius: f64::INFINITY,
        window,
        fit_residual: 0.0,
        points_used,
        method: RadiusMethod::CauchyHadamardRegression,
    };
    if pts.len() < 2 {
        return Ok(infinite(pts.len()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid = (pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    let radius = (-slope).exp();
    if radius > INFINITE_RADIUS {
        return Ok(RadiusEstimate {
            fit_residual: resid,
            ..infinite(pts.len())
        });
    }
    Ok(RadiusEstimate {
        radius,
        window,
        fit_residual: resid,
        points_used: pts.len(),
        method: RadiusMethod::CauchyHadamardRegression,
    })
}

/// Radius of convergence of a Taylor series; window defaults to `[N/2, N]`.
pub fn radius_estimate(
    series: &TaylorSeries,
    window: Option<(usize, usize)>,
) -> Result<RadiusEstimate> {
    decay_rate(
        series.coeffs(),
        window.unwrap_or_else(|| default_window(series.order())),
    )
}

/// Inner and outer radii of the annulus of a Laurent series, from the
/// negative and nonnegative tails respectively.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnulusEstimate {
    #[serde(serialize_with = "ser_f64")]
    pub inner: f64,
    pub outer: RadiusEstimate,
    /// Decay of the negative tail; `inner` is its reciprocal.
    pub negative_tail: RadiusEstimate,
}

pub fn annulus_estimate(
    series: &LaurentSeries,
    window: Option<(usize, usize)>,
) -> Result<AnnulusEstimate> {
    let w = window.unwrap_or_else(|| default_window(series.order()));
    let outer = decay_rate(&series.nonnegative_part(), w)?;
    // negative_part()[k - 1] holds c_{-k}
    let mut neg = vec![C64::new(0.0, 0.0)];
    neg.extend(series.negative_part());
    let negative_tail = decay_rate(&neg, w)?;
    Ok(AnnulusEstimate {
        inner: 1.0 / negative_tail.radius,
        outer,
        negative_tail,
    })
}

/// One measured quantity compared with its target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: String,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub target: f64,
    #[serde(serialize_with = "ser_f64")]
    pub deviation: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|value - target| / |target| <= tol`; two infinities agree.
    pub fn relative(name: &str, value: f64, target: f64, tol: f64) -> Self {
        let deviation =
            if value.is_infinite() && target.is_infinite() && value.signum() == target.signum() {
                0.0
            } else if value.is_infinite() || target.is_infinite() {
                f64::INFINITY
            } else {
                (value - target).abs() / target.abs()
            };
        Self::finish(name, "relative", value, target, deviation, tol)
    }

    /// `|value - target| <= tol`.
    pub fn absolute(name: &str, value: f64, target: f64, tol: f64) -> Self {
        let deviation = if value == target {
            0.0
        } else {
            (value - target).abs()
        };
        Self::finish(name, "absolute", value, target, deviation, tol)
    }

    /// `value >= bound`.
    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        let deviation = if value >= bound { 0.0 } else { bound - value };
        Self::finish(name, "at-least", value, bound, deviation, 0.0)
    }

    /// `value <= bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        let deviation = if value <= bound { 0.0 } else { value - bound };
        Self::finish(name, "at-most", value, bound, deviation, 0.0)
    }

    /// A yes/no condition recorded as deviation 0 or 1.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self::finish(
            name,
            "holds",
            if ok { 1.0 } else { 0.0 },
            1.0,
            if ok { 0.0 } else { 1.0 },
            0.0,
        )
    }

    fn finish(
        name: &str,
        relation: &str,
        value: f64,
        target: f64,
        deviation: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.to_string(),
            relation: relation.to_string(),
            value,
            target,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        }
    }
}

/// Outcome of one verification suite. `pass` holds exactly when every check
/// passes; serialization order is fixed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    #[serde(serialize_with = "ser_map")]
    pub measured: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            measured: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            notes: Vec::new(),
        }
    }

    pub fn measure(&mut self, name: &str, value: f64) {
        self.measured.insert(name.to_string(), value);
    }

    pub fn check(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn record_estimate(&mut self, name: &str, est: &RadiusEstimate) {
        self.measure(name, est.radius);
        self.measure(&format!("{name}.points"), est.points_used as f64);
        self.measure(&format!("{name}.residual"), est.fit_residual);
        if !est.is_conclusive() {
            self.note(format!(
                "{name}: only {} coefficients above the underflow floor",
                est.points_used
            ));
            self.check(Check::holds(&format!("{name}.conclusive"), false));
        }
    }
}

/// Knobs shared by the verification suites.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub order: usize,
    pub window: Option<(usize, usize)>,
    /// Relative tolerance for radius equalities.
    pub equality_tol: f64,
    /// Slack on one-sided "at least" radius claims.
    pub one_sided_slack: f64,
    pub hp_bits: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            order: 64,
            window: None,
            equality_tol: 0.05,
            one_sided_slack: 0.1,
            hp_bits: hp::DEFAULT_BITS,
        }
    }
}

impl VerifyOptions {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    fn window(&self) -> (usize, usize) {
        self.window.unwrap_or_else(|| default_window(self.order))
    }
}

/// Number of Verblunsky coefficients the high-precision suites want for a
/// series of order `n`.
pub fn recommended_terms(n: usize) -> usize {
    4 * n + 80
}

fn alpha_window(coeffs: &VerblunskyCoeffs, n: usize) -> Result<Vec<C64>> {
    coeffs.take(n + 1)
}

/// Geometric decay of `α_n` versus the radius of `D^{-1}`: the two must agree.
pub fn verify_nevai_totik(
    coeffs: &VerblunskyCoeffs,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let n = opts.order;
    let mut rep = VerificationReport::new("nevai-totik");
    let r_alpha = decay_rate(&alpha_window(coeffs, n)?, opts.window())?;
    let dinv = szego::dinv_from_alphas_hp(coeffs, n, opts.hp_bits)?;
    let r_d = radius_estimate(&dinv, opts.window)?;
    rep.record_estimate("radius.alpha", &r_alpha);
    rep.record_estimate("radius.dinv", &r_d);
    rep.check(Check::relative(
        "radius.dinv/radius.alpha",
        r_d.radius,
        r_alpha.radius,
        opts.equality_tol,
    ));
    Ok(rep)
}

/// `|a_n - 1| + |b_n|` for the parameters obtained from real `α`, computed
/// from the exact deviations so values far below `1e-16` survive.
pub fn jacobi_deviation_sequence(coeffs: &VerblunskyCoeffs, count: usize) -> Result<Vec<C64>> {
    let dev = szego::geronimus_deviations(coeffs, count)?;
    let mut out = vec![C64::new(0.0, 0.0)];
    for (b, x) in dev {
        if !(1.0 + x > 0.0) {
            return Err(Error::Degenerate(format!(
                "a^2 = {} is not positive",
                1.0 + x
            )));
        }
        let a_minus_one = x / (1.0 + (1.0 + x).sqrt());
        out.push(C64::new(a_minus_one.abs() + b.abs(), 0.0));
    }
    Ok(out)
}

/// Decay of the Jacobi parameters `limsup (|a_n - 1| + |b_n|)^{1/2n}` versus the
/// radius of the Jost function. Takes the real Verblunsky coefficients the
/// parameters come from, since the Jost function is built from them.
pub fn verify_jacobi_decay(
    coeffs: &VerblunskyCoeffs,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let n = opts.order;
    let mut rep = VerificationReport::new("jacobi-decay");
    let count = szego::geronimus_len(coeffs).min(n + 1);
    if count < n + 1 {
        rep.note(format!(
            "only {count} Jacobi pairs available for a window ending at {n}"
        ));
        rep.check(Check::holds("enough.coefficients", false));
        return Ok(rep);
    }
    let seq = jacobi_deviation_sequence(coeffs, n)?;
    let r_seq = decay_rate(&seq, opts.window())?;
    let r_jacobi = r_seq.radius.sqrt();
    let dinv = szego::dinv_from_alphas_hp(coeffs, n, opts.hp_bits)?;
    let u = szego::u_from_d(coeffs, &dinv)?;
    let r_u = radius_estimate(&u.u, opts.window)?;
    rep.record_estimate("radius.jacobi-squared", &r_seq);
    rep.measure("radius.jacobi", r_jacobi);
    rep.record_estimate("radius.jost", &r_u);
    rep.check(Check::relative(
        "radius.jost/radius.jacobi",
        r_u.radius,
        r_jacobi,
        opts.equality_tol,
    ));
    Ok(rep)
}

/// Compare the point mass at the eigenvalue `z0 + 1/z0` with the weight the
/// Jost function predicts: `Res_{z0} M = (z0 - 1/z0) / (u'(z0) u(1/z0))`.
pub fn canonical_weight_check(
    params: &JacobiParams,
    z0: C64,
    oracle_size: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let g = jost::jost_polynomial(params)?;
    let scale: f64 = g.iter().map(|c| c.norm()).sum();
    let (u0, du0) = poly::eval_with_derivative(&g, z0);
    if z0.norm() >= 1.0 || u0.norm() > 1e-8 * scale {
        return Err(Error::Precondition(format!(
            "z0 = {z0} is not a zero of the Jost function inside the disk"
        )));
    }
    let u_reflect = poly::eval(&g, 1.0 / z0);
    if u_reflect.norm() <= 1e-10 * scale || du0.norm() <= 1e-14 * scale {
        return Err(Error::Degenerate(format!(
            "zero at {z0} collides with a resonance or is not simple"
        )));
    }
    let predicted_residue = (z0 - 1.0 / z0) / (du0 * u_reflect);
    let chain = 1.0 - 1.0 / (z0 * z0);
    let predicted_weight = (predicted_residue * chain).re;

    let measure = spectral_measure_oracle(params, oracle_size, 0.0)?;
    let e0 = joukowski(z0).re;
    let idx = measure.nearest(e0);
    let weight = measure.weights()[idx];
    let residue = weight / chain;

    let mut rep = VerificationReport::new("canonical-weights");
    rep.measure("z0.re", z0.re);
    rep.measure("z0.im", z0.im);
    rep.measure("eigenvalue", e0);
    rep.measure("oracle.eigenvalue", measure.nodes()[idx]);
    rep.measure("oracle.weight", weight);
    rep.measure("oracle.residue.re", residue.re);
    rep.measure("predicted.weight", predicted_weight);
    rep.measure("predicted.residue.re", predicted_residue.re);
    rep.check(Check::relative("weight", weight, predicted_weight, tol));
    rep.check(Check::absolute(
        "eigenvalue",
        measure.nodes()[idx],
        e0,
        1e-8 * e0.abs().max(1.0),
    ));
    Ok(rep)
}

/// [`canonical_weight_check`] at every zero of `g_ℓ` in the disk.
pub fn canonical_weights(
    params: &JacobiParams,
    oracle_size: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let data = jost::jost_data(params)?;
    let mut rep = VerificationReport::new("canonical-weights");
    rep.measure("zeros", data.zeros_in_disk.len() as f64);
    for (i, &z0) in data.zeros_in_disk.iter().enumerate() {
        let sub = canonical_weight_check(params, z0, oracle_size, tol)?;
        for (k, v) in sub.measured {
            rep.measure(&format!("zero{i}.{k}"), v);
        }
        for mut c in sub.checks {
            c.name = format!("zero{i}.{}", c.name);
            rep.check(c);
        }
    }
    if data.zeros_in_disk.is_empty() {
        rep.note("no Jost zeros in the disk");
    }
    Ok(rep)
}

/// Laurent coefficients `m = -n..=n` of `r = D^{-1}(z) / conj(D^{-1}(1/conj z))`
/// in fixed point.
pub fn r_series_hp(coeffs: &VerblunskyCoeffs, n: usize, bits: u32) -> Result<LaurentSeries> {
    LaurentSeries::new(hp::to_c64(&r_coeffs_hp(coeffs, n, bits)?), None)
}

fn r_coeffs_hp(coeffs: &VerblunskyCoeffs, n: usize, bits: u32) -> Result<Vec<HpComplex>> {
    hp::check_bits(bits)?;
    let alphas = hp::to_hp(coeffs.stored(), bits);
    let star = hp::monic_phi_star(&alphas, bits);
    hp::unimodular_ratio(&star, n, bits)
}

/// Coefficients `0..=n` of `r - S`, subtracted before rounding so the
/// cancellation between the two does not drown in double-precision noise.
pub fn r_minus_s_hp(coeffs: &VerblunskyCoeffs, n: usize, bits: u32) -> Result<Vec<C64>> {
    let r = r_coeffs_hp(coeffs, n, bits)?;
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let s = if m == 0 {
            HpComplex::one(bits)
        } else {
            HpComplex::from_c64(coeffs.alpha(m - 1)?, bits).neg()
        };
        out.push(r[n + m].sub(&s).to_c64());
    }
    Ok(out)
}

/// `r - S` is analytic out to `R^3` when `α_n` decays like `R^{-n}`; the
/// radii of `r` and `S` themselves are checked against `R` first.
pub fn verify_r_minus_s(
    coeffs: &VerblunskyCoeffs,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let n = opts.order;
    let w = opts.window();
    let mut rep = VerificationReport::new("r-minus-s");
    let r_alpha = decay_rate(&alpha_window(coeffs, n)?, w)?;
    let s = szego::s_series(coeffs, n)?;
    let r = r_series_hp(coeffs, n, opts.hp_bits)?;
    let diff = r_minus_s_hp(coeffs, n, opts.hp_bits)?;
    let r_s = radius_estimate(&s, Some(w))?;
    let r_r = decay_rate(&r.nonnegative_part(), w)?;
    let r_diff = decay_rate(&diff, w)?;
    rep.record_estimate("radius.alpha", &r_alpha);
    rep.record_estimate("radius.s", &r_s);
    rep.record_estimate("radius.r", &r_r);
    rep.record_estimate("radius.r-minus-s", &r_diff);
    let big_r = r_alpha.radius;
    rep.check(Check::relative(
        "radius.s/radius.alpha",
        r_s.radius,
        big_r,
        opts.equality_tol,
    ));
    rep.check(Check::relative(
        "radius.r/radius.alpha",
        r_r.radius,
        big_r,
        opts.equality_tol,
    ));
    rep.check(Check::at_least(
        "radius.r-minus-s",
        r_diff.radius,
        (1.0 - opts.one_sided_slack) * big_r.powi(3),
    ));
    Ok(rep)
}

/// Fixed-point `B` coefficients `0..len` for the Jacobi parameters of real `α`.
fn b_coeffs_hp(alphas: &[HpComplex], len: usize, bits: u32) -> Vec<HpComplex> {
    let zero = Fixed::zero(bits);
    let one = Fixed::one(bits);
    let al = |i: usize| {
        alphas
            .get(i)
            .map(|a| a.re.clone())
            .unwrap_or_else(|| zero.clone())
    };
    let mut out = vec![HpComplex::zero(bits); len];
    if len > 0 {
        out[0] = HpComplex::one(bits);
    }
    let mut n = 0;
    while 2 * n + 1 < len {
        let (a0, a1, a2, a3) = (al(2 * n), al(2 * n + 1), al(2 * n + 2), al(2 * n + 3));
        let b = a0.sub(&a2).sub(&a1.mul(&a0.add(&a2)));
        let dev = a1
            .sub(&a3)
            .sub(&a2.mul(&a2).mul(&one.sub(&a3)).mul(&one.add(&a1)))
            .sub(&a3.mul(&a1));
        out[2 * n + 1] = HpComplex::from_real(b.neg());
        if 2 * n + 2 < len {
            out[2 * n + 2] = HpComplex::from_real(dev.neg());
        }
        n += 1;
    }
    out
}

/// Laurent coefficients `-n..=n` of `(1 - z^2) u(z) + z^2 u(1/z) B(z)` with
/// `u` the Jost function of real `α`.
pub fn jost_combination_hp(
    coeffs: &VerblunskyCoeffs,
    n: usize,
    bits: u32,
) -> Result<LaurentSeries> {
    hp::check_bits(bits)?;
    let pref = Fixed::from_f64(szego::jost_prefactor(coeffs)?, bits);
    let alphas = hp::to_hp(coeffs.stored(), bits);
    let kappa = hp::kappa(&alphas, bits)?;
    let scale = kappa.mul(&pref);
    let u: Vec<HpComplex> = hp::monic_phi_star(&alphas, bits)
        .iter()
        .map(|c| c.scale(&scale))
        .collect();
    let big_b = b_coeffs_hp(&alphas, u.len() + n + 2, bits);
    let mut out = Vec::with_capacity(2 * n + 1);
    for m in -(n as i64)..=(n as i64) {
        let mut acc = HpComplex::zero(bits);
        if (0..u.len() as i64).contains(&m) {
            acc = acc.add(&u[m as usize]);
        }
        if (0..u.len() as i64).contains(&(m - 2)) {
            acc = acc.sub(&u[(m - 2) as usize]);
        }
        for (k, uk) in u.iter().enumerate() {
            let j = m - 2 + k as i64;
            if j >= 0 && (j as usize) < big_b.len() && !uk.is_zero() && !big_b[j as usize].is_zero()
            {
                acc = acc.add(&uk.mul(&big_b[j as usize]));
            }
        }
        out.push(acc);
    }
    LaurentSeries::new(hp::to_c64(&out), None)
}

/// The combination `(1 - z^2) u(z) + z^2 u(1/z) B(z)` is analytic in
/// `R^{-1} < |z| < R^2` where `R` is the Jacobi decay rate.
pub fn verify_jost_combination(
    coeffs: &VerblunskyCoeffs,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let n = opts.order;
    let w = opts.window();
    let mut rep = VerificationReport::new("jost-combination");
    let count = szego::geronimus_len(coeffs).min(n + 1);
    if count < n + 1 {
        rep.note(format!(
            "only {count} Jacobi pairs available for a window ending at {n}"
        ));
        rep.check(Check::holds("enough.coefficients", false));
        return Ok(rep);
    }
    let seq = jacobi_deviation_sequence(coeffs, n)?;
    let r_seq = decay_rate(&seq, w)?;
    let big_r = r_seq.radius.sqrt();
    let comb = jost_combination_hp(coeffs, n, opts.hp_bits)?;
    let ann = annulus_estimate(&comb, Some(w))?;
    rep.record_estimate("radius.jacobi-squared", &r_seq);
    rep.measure("radius.jacobi", big_r);
    rep.record_estimate("radius.outer", &ann.outer);
    rep.record_estimate("radius.negative-tail", &ann.negative_tail);
    rep.measure("radius.inner", ann.inner);
    rep.check(Check::at_least(
        "radius.outer",
        ann.outer.radius,
        (1.0 - opts.one_sided_slack) * big_r * big_r,
    ));
    rep.check(Check::at_most(
        "radius.inner",
        ann.inner,
        (1.0 + opts.one_sided_slack) / big_r,
    ));
    Ok(rep)
}

/// Products `z_1 … z_{n+1} conj(z_{n+2}) … conj(z_{2n+1})` over generators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductSet {
    pub generators: Vec<C64>,
    pub elements: Vec<C64>,
}

fn multisets(k: usize, m: usize) -> Vec<Vec<usize>> {
    // Nondecreasing index tuples of length k from 0..m.
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i, k, m, cur, out);
            cur.pop();
        }
    }
    rec(0, k, m, &mut cur, &mut out);
    out
}

/// All distinct products of order `n <= n_max` (every order whose smallest
/// product fits, when `n_max` is `None`) with modulus at most `cutoff`.
pub fn gset(generators: &[C64], n_max: Option<usize>, cutoff: f64) -> Result<ProductSet> {
    if let Some(g) = generators.iter().find(|g| !(g.norm() > 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "generator {g} is not outside the closed unit disk"
        )));
    }
    let max_mod = generators.iter().map(|g| g.norm()).fold(0.0, f64::max);
    if cutoff < max_mod {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} is below the largest generator modulus {max_mod}"
        )));
    }
    let mut elements: Vec<C64> = Vec::new();
    if generators.is_empty() {
        return Ok(ProductSet {
            generators: Vec::new(),
            elements,
        });
    }
    let min_mod = generators
        .iter()
        .map(|g| g.norm())
        .fold(f64::INFINITY, f64::min);
    // Products only grow in modulus, so orders beyond this are empty.
    let reachable = ((cutoff.ln() / min_mod.ln() - 1.0) / 2.0).floor().max(0.0) as usize;
    let top = n_max.map_or(reachable, |m| m.min(reachable));
    let m = generators.len();
    for n in 0..=top {
        let plain: Vec<C64> = multisets(n + 1, m)
            .into_iter()
            .map(|ix| ix.iter().map(|&i| generators[i]).product())
            .filter(|p: &C64| p.norm() <= cutoff * (1.0 + 1e-12))
            .collect();
        let conj: Vec<C64> = multisets(n, m)
            .into_iter()
            .map(|ix| ix.iter().map(|&i| generators[i].conj()).product())
            .collect();
        for p in &plain {
            for q in &conj {
                let z = p * q;
                if z.norm() <= cutoff * (1.0 + 1e-12)
                    && !elements
                        .iter()
                        .any(|e| (e - z).norm() <= 1e-10 * z.norm().max(1.0))
                {
                    elements.push(z);
                }
            }
        }
    }
    elements.sort_by(|a, b| {
        let key = |z: &C64| ((z.norm() * 1e9).round(), (z.arg() * 1e9).round());
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    Ok(ProductSet {
        generators: generators.to_vec(),
        elements,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PadePole {
    pub z: C64,
    /// Moved by less than `1e-4` when the numerator degree grows by two.
    pub stable: bool,
}

/// Poles of the `[l/m]` Padé approximant. Tail coefficients of a polynomial
/// series vanish, in which case there are no poles.
fn pade_poles(c: &[C64], l: usize, m: usize) -> Result<Vec<C64>> {
    if c.len() < l + m + 1 {
        return Err(Error::InvalidParameter(format!(
            "series has {} coefficients, [{l}/{m}] needs {}",
            c.len(),
            l + m + 1
        )));
    }
    let tail_scale = c[l + 1..].iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m == 0 || tail_scale <= UNDERFLOW_FLOOR {
        return Ok(Vec::new());
    }
    let get = |i: i64| {
        if i < 0 {
            C64::new(0.0, 0.0)
        } else {
            c[i as usize]
        }
    };
    let a = DMatrix::from_fn(m, m, |i, j| get(l as i64 + i as i64 + 1 - (j as i64 + 1)));
    let rhs = DVector::from_fn(m, |i, _| -get(l as i64 + i as i64 + 1));
    let sv = a.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition < 1e14) {
        return Err(Error::IllConditioned { condition });
    }
    let q = a
        .lu()
        .solve(&rhs)
        .ok_or(Error::IllConditioned { condition })?;
    let mut den = vec![C64::new(1.0, 0.0)];
    den.extend(q.iter().copied());
    let den = poly::trim(&den, 1e-14);
    if den.len() <= 1 {
        return Ok(Vec::new());
    }
    poly::roots(&den)
}

/// Poles of the `(l, m)` Padé approximant, each flagged stable if some pole
/// of the `(l + 2, m)` approximant lies within `1e-4`.
pub fn pade_pole_probe(series: &TaylorSeries, degree: (usize, usize)) -> Result<Vec<PadePole>> {
    let (l, m) = degree;
    let c = series.coeffs();
    let poles = pade_poles(c, l, m)?;
    let refined = if c.len() >= l + m + 3 {
        pade_poles(c, l + 2, m).unwrap_or_default()
    } else {
        Vec::new()
    };
    Ok(poles
        .into_iter()
        .map(|z| PadePole {
            z,
            stable: refined.iter().any(|w| (w - z).norm() < 1e-4),
        })
        .collect())
}

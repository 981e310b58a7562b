use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use num_complex::Complex64;
use opdecay::analysis::{self, VerificationReport, VerifyOptions};
use opdecay::jost::{self, JostData};
use opdecay::measure::{self, MeasureKind};
use opdecay::oprl::{self, JacobiParams};
use opdecay::opuc::{self, VerblunskyCoeffs};
use opdecay::series::TaylorSeries;
use opdecay::szego;

use crate::config::ExperimentConfig;
use crate::inputs;
use crate::output::{Cell, Outcome, Table};

fn num(x: f64) -> Cell {
    Cell::Num(x)
}

fn int(i: usize) -> Cell {
    Cell::Int(i as i64)
}

/// Length used when a generator describes an infinite sequence.
fn generated_len(order: usize, n: usize) -> usize {
    analysis::recommended_terms(order).max(2 * n + 4)
}

fn alpha_input(spec: &str, len: usize, out: &mut Outcome) -> Result<VerblunskyCoeffs> {
    let (coeffs, file) = inputs::parse_alpha(spec, len)?;
    out.inputs.extend(file);
    Ok(coeffs)
}

fn finite_range_input(a: &Option<String>, b: &Option<String>) -> Result<JacobiParams> {
    let a = a
        .as_deref()
        .map(inputs::parse_real_list)
        .transpose()?
        .unwrap_or_default();
    let b = b
        .as_deref()
        .map(inputs::parse_real_list)
        .transpose()?
        .unwrap_or_default();
    let len = a.len().max(b.len());
    let pad = |mut v: Vec<f64>, fill: f64| {
        v.resize(len, fill);
        v
    };
    Ok(JacobiParams::finite_range(pad(a, 1.0), pad(b, 0.0))?)
}

fn series_table(name: &str, series: &TaylorSeries) -> Table {
    let mut t = Table::new(name, &["k", "re", "im", "abs"]);
    for (k, c) in series.coeffs().iter().enumerate() {
        t.push(vec![int(k), num(c.re), num(c.im), num(c.norm())]);
    }
    t
}

fn record_radius(out: &mut Outcome, key: &str, series: &TaylorSeries, cfg: &ExperimentConfig) {
    let window = cfg.window().filter(|w| w.1 <= series.order());
    match analysis::radius_estimate(series, window) {
        Ok(est) => {
            out.summarize(&format!("radius.{key}"), est.radius);
            out.summarize(&format!("radius.{key}.points"), est.points_used as f64);
        }
        Err(e) => out.notes.push(format!("radius.{key}: {e}")),
    }
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    /// Coefficient sequence (geometric:C=..,R=.. | constant:c=.. | list:.. | file:PATH).
    #[arg(long, conflicts_with = "measure", required_unless_present = "measure")]
    pub alpha: Option<String>,
    /// Measure description (TOML).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Number of coefficients to emit.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Emit the Jacobi parameters of the mapped line measure instead.
    #[arg(long)]
    pub geronimus: bool,
}

fn jacobi_table(params: &JacobiParams, n: usize) -> Result<Table> {
    let mut t = Table::new("coeffs", &["n", "a", "b"]);
    for k in 1..=n {
        t.push(vec![int(k), num(params.a(k)?), num(params.b(k)?)]);
    }
    Ok(t)
}

pub fn coeffs(args: &CoeffsArgs, cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    if args.n == 0 {
        bail!("--n must be positive");
    }
    let circle = if let Some(path) = &args.measure {
        let (spec, file) = inputs::parse_measure(path)?;
        out.inputs.push(file);
        match spec.kind {
            MeasureKind::Line => {
                if args.geronimus {
                    bail!("--geronimus applies to circle measures and coefficient sequences");
                }
                let params = measure::ingest_line(&spec, args.n, cfg.line_nodes)?;
                out.tables.push(jacobi_table(&params, args.n)?);
                return Ok(out);
            }
            MeasureKind::Circle => measure::ingest_circle(&spec, args.n, cfg.grid)?,
        }
    } else {
        alpha_input(
            args.alpha.as_deref().unwrap_or_default(),
            generated_len(cfg.order, args.n),
            &mut out,
        )?
    };
    if args.geronimus {
        let params = szego::geronimus_map(&circle)?;
        out.tables.push(jacobi_table(&params, args.n)?);
    } else {
        let mut t = Table::new("coeffs", &["n", "alpha_re", "alpha_im", "rho"]);
        for k in 0..args.n {
            let a = circle.alpha(k)?;
            t.push(vec![int(k), num(a.re), num(a.im), num(circle.rho(k)?)]);
        }
        out.tables.push(t);
    }
    Ok(out)
}

#[derive(Args, Debug)]
pub struct SzegoArgs {
    /// Coefficient sequence, same forms as for `coeffs`.
    #[arg(long, conflicts_with = "measure", required_unless_present = "measure")]
    pub alpha: Option<String>,
    /// Circle measure description (TOML); the Szegő function is built from its weight.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Series order (overrides the configuration).
    #[arg(long)]
    pub order: Option<usize>,
}

pub fn szego(args: &SzegoArgs, cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let n = cfg.order;
    let (d, dinv) = if let Some(path) = &args.measure {
        let (spec, file) = inputs::parse_measure(path)?;
        out.inputs.push(file);
        let m = measure::circle_measure(&spec, cfg.grid)?;
        let d = szego::d_from_weight(&m, n)?;
        let dinv = d.inverse()?;
        (d, dinv)
    } else {
        let coeffs = alpha_input(
            args.alpha.as_deref().unwrap_or_default(),
            generated_len(n, n),
            &mut out,
        )?;
        let dinv = szego::dinv_from_alphas_hp(&coeffs, n, cfg.hp_bits)?;
        (dinv.inverse()?, dinv)
    };
    out.notes.extend(dinv.warning().map(str::to_string));
    record_radius(&mut out, "dinv", &dinv, cfg);
    record_radius(&mut out, "d", &d, cfg);
    out.tables.push(series_table("szego_dinv", &dinv));
    out.tables.push(series_table("szego_d", &d));
    Ok(out)
}

#[derive(Args, Debug)]
pub struct JostArgs {
    /// Real coefficient sequence; mapped to the line before building the Jost function.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub alpha: Option<String>,
    /// Off-diagonal entries a_1,a_2,.. of a finite-range matrix (free afterwards).
    #[arg(long)]
    pub a: Option<String>,
    /// Diagonal entries b_1,b_2,.. of a finite-range matrix.
    #[arg(long)]
    pub b: Option<String>,
    /// Series order (overrides the configuration).
    #[arg(long)]
    pub order: Option<usize>,
}

pub fn jost(args: &JostArgs, cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let data: JostData = if let Some(spec) = &args.alpha {
        let coeffs = alpha_input(spec, generated_len(cfg.order, cfg.order), &mut out)?;
        let dinv = szego::dinv_from_alphas_hp(&coeffs, cfg.order, cfg.hp_bits)?;
        szego::u_from_d(&coeffs, &dinv)?
    } else if args.a.is_some() || args.b.is_some() {
        jost::jost_data(&finite_range_input(&args.a, &args.b)?)?
    } else {
        bail!("give --alpha or finite-range --a/--b");
    };
    record_radius(&mut out, "u", &data.u, cfg);
    out.summarize("zeros", data.zeros_in_disk.len() as f64);
    out.tables.push(series_table("jost_u", &data.u));
    let mut z = Table::new("jost_zeros", &["z_re", "z_im", "e_re", "e_im"]);
    for (zz, e) in data.zeros_in_disk.iter().zip(&data.eigenvalues) {
        z.push(vec![num(zz.re), num(zz.im), num(e.re), num(e.im)]);
    }
    out.tables.push(z);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct CarmonaArgs {
    /// Use the free parameters a ≡ 1, b ≡ 0.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub free: bool,
    /// Off-diagonal entries of a finite-range matrix.
    #[arg(long)]
    pub a: Option<String>,
    /// Diagonal entries of a finite-range matrix.
    #[arg(long)]
    pub b: Option<String>,
    /// Index n of the approximating measure.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Evaluation grid lo:hi:count.
    #[arg(long, default_value = "-5:5:1001", allow_hyphen_values = true)]
    pub grid: String,
}

pub fn carmona(args: &CarmonaArgs, cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let params = if args.free {
        JacobiParams::free()
    } else if args.a.is_some() || args.b.is_some() {
        finite_range_input(&args.a, &args.b)?
    } else {
        bail!("give --free or finite-range --a/--b");
    };
    if args.n == 0 {
        bail!("--n must be positive");
    }
    let mut d = Table::new("carmona", &["x", "density"]);
    for x in inputs::parse_grid(&args.grid)? {
        d.push(vec![
            num(x),
            num(oprl::carmona_density(&params, args.n, x)?),
        ]);
    }
    out.tables.push(d);
    let oracle = oprl::spectral_measure_oracle(&params, cfg.oracle_size.max(args.n + 1), 0.0)?;
    let mut m = Table::new("carmona_moments", &["l", "carmona", "spectral", "abs_diff"]);
    for l in 0..=(2 * args.n - 2) as u32 {
        let c = oprl::carmona_moment(&params, args.n, l)?;
        let s = oracle.moment(l);
        m.push(vec![
            Cell::Int(l as i64),
            num(c),
            num(s),
            num((c - s).abs()),
        ]);
    }
    out.tables.push(m);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct PopucArgs {
    /// Coefficient sequence α_0, α_1, ...
    #[arg(long)]
    pub alpha: String,
    /// Degree n of Φ_n; the paraorthogonal polynomial has degree n + 1.
    #[arg(long)]
    pub n: usize,
    /// Angle θ of the boundary parameter ω = e^{iθ}.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub omega_angle: f64,
}

pub fn popuc(args: &PopucArgs, cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let coeffs = alpha_input(&args.alpha, generated_len(cfg.order, args.n), &mut out)?;
    let omega = Complex64::from_polar(1.0, args.omega_angle);
    let p = opuc::popuc(&coeffs, args.n, omega)?;
    let masses = opuc::popuc_measure(&coeffs, args.n, omega)?;
    let mut zeros = p.zeros.clone();
    zeros.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    let mut t = Table::new(
        "popuc",
        &["k", "z_re", "z_im", "modulus", "angle", "weight"],
    );
    let mut worst: f64 = 0.0;
    for (k, z) in zeros.iter().enumerate() {
        let (_, w) = masses
            .point_masses()
            .iter()
            .min_by(|x, y| angle_gap(x.0, z.arg()).total_cmp(&angle_gap(y.0, z.arg())))
            .copied()
            .ok_or_else(|| anyhow!("no mass points"))?;
        worst = worst.max((z.norm() - 1.0).abs());
        t.push(vec![
            int(k),
            num(z.re),
            num(z.im),
            num(z.norm()),
            num(z.arg()),
            num(w),
        ]);
    }
    out.summarize("max_modulus_deviation", worst);
    out.tables.push(t);
    Ok(out)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Decay rate of α equals the radius of D^{-1}.
    NevaiTotik,
    /// Jacobi parameters of real α decay at the square of the α rate.
    JacobiDecay,
    /// r − S is analytic up to R^3.
    RMinusS,
    /// (1 − z^2)u + z^2 u(1/z) B on the annulus R^{-1} < |z| < R^2.
    JostCombination,
    /// Point masses of a finite-range matrix match the Jost residues.
    CanonicalWeights,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::NevaiTotik => "nevai-totik",
            Suite::JacobiDecay => "jacobi-decay",
            Suite::RMinusS => "r-minus-s",
            Suite::JostCombination => "jost-combination",
            Suite::CanonicalWeights => "canonical-weights",
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub suite: Suite,
    /// Coefficient sequence for the α-based suites.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Off-diagonal entries for canonical-weights.
    #[arg(long)]
    pub a: Option<String>,
    /// Diagonal entries for canonical-weights.
    #[arg(long)]
    pub b: Option<String>,
    /// Series order (overrides the configuration).
    #[arg(long)]
    pub order: Option<usize>,
}

pub fn verify(args: &VerifyArgs, cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let opts = VerifyOptions {
        order: cfg.order,
        window: cfg.window(),
        equality_tol: cfg.tolerances.equality,
        one_sided_slack: cfg.tolerances.one_sided,
        hp_bits: cfg.hp_bits,
    };
    let report: VerificationReport = if args.suite == Suite::CanonicalWeights {
        if args.a.is_none() && args.b.is_none() {
            bail!("canonical-weights needs finite-range --a/--b");
        }
        analysis::canonical_weights(
            &finite_range_input(&args.a, &args.b)?,
            cfg.oracle_size,
            cfg.tolerances.canonical,
        )?
    } else {
        let spec = args
            .alpha
            .as_deref()
            .ok_or_else(|| anyhow!("suite {} needs --alpha", args.suite.name()))?;
        let coeffs = alpha_input(spec, analysis::recommended_terms(cfg.order), &mut out)?;
        match args.suite {
            Suite::NevaiTotik => analysis::verify_nevai_totik(&coeffs, &opts)?,
            Suite::JacobiDecay => analysis::verify_jacobi_decay(&coeffs, &opts)?,
            Suite::RMinusS => analysis::verify_r_minus_s(&coeffs, &opts)?,
            Suite::JostCombination => analysis::verify_jost_combination(&coeffs, &opts)?,
            Suite::CanonicalWeights => unreachable!(),
        }
    };
    let name = args.suite.name().replace('-', "_");
    let mut checks = Table::new(
        &format!("verify_{name}"),
        &[
            "check",
            "relation",
            "value",
            "target",
            "deviation",
            "tolerance",
            "pass",
        ],
    );
    for c in &report.checks {
        checks.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Text(c.relation.clone()),
            num(c.value),
            num(c.target),
            num(c.deviation),
            num(c.tolerance),
            Cell::Bool(c.pass),
        ]);
    }
    out.tables.push(checks);
    let mut measured = Table::new(&format!("verify_{name}_measured"), &["quantity", "value"]);
    for (k, v) in &report.measured {
        measured.push(vec![Cell::Text(k.clone()), num(*v)]);
    }
    out.tables.push(measured);
    out.report = Some(report);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct GsetArgs {
    /// Comma-separated generators outside the unit disk (e.g. 2,3i,1+2i).
    #[arg(long)]
    pub generators: String,
    /// Keep products of modulus at most this.
    #[arg(long)]
    pub cutoff: f64,
    /// Largest product order n.
    #[arg(long)]
    pub n_max: Option<usize>,
}

pub fn gset(args: &GsetArgs) -> Result<Outcome> {
    let mut out = Outcome::default();
    let gens = inputs::parse_complex_list(&args.generators).context("--generators")?;
    let set = analysis::gset(&gens, args.n_max, args.cutoff)?;
    let mut t = Table::new("gset", &["re", "im", "modulus"]);
    for z in &set.elements {
        t.push(vec![num(z.re), num(z.im), num(z.norm())]);
    }
    out.summarize("elements", set.elements.len() as f64);
    out.tables.push(t);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbeTarget {
    /// Inverse Szegő function D^{-1}.
    Dinv,
    /// S(z) = -Σ α_{n-1} z^n.
    S,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    /// Coefficient sequence α_0, α_1, ...
    #[arg(long)]
    pub alpha: String,
    /// Series whose poles are probed.
    #[arg(long, value_enum, default_value_t = ProbeTarget::Dinv)]
    pub series: ProbeTarget,
    /// Padé degrees L,M; defaults to (N/2, 4) for series order N.
    #[arg(long)]
    pub pade: Option<String>,
    /// Series order (overrides the configuration).
    #[arg(long)]
    pub order: Option<usize>,
}

/// Padé poles with the largest denominator degree `<= m` whose system is
/// well conditioned.
fn probe_adaptive(
    series: &TaylorSeries,
    l: usize,
    m: usize,
) -> Result<(usize, Vec<analysis::PadePole>)> {
    for k in (1..=m).rev() {
        match analysis::pade_pole_probe(series, (l, k)) {
            Ok(poles) => return Ok((k, poles)),
            Err(opdecay::Error::IllConditioned { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok((0, Vec::new()))
}

pub fn probe(args: &ProbeArgs, cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let n = cfg.order;
    let coeffs = alpha_input(&args.alpha, generated_len(n, n), &mut out)?;
    let s = szego::s_series(&coeffs, n)?;
    let series = match args.series {
        ProbeTarget::Dinv => szego::dinv_from_alphas_hp(&coeffs, n, cfg.hp_bits)?,
        ProbeTarget::S => s.clone(),
    };
    let (l, poles) = match &args.pade {
        Some(text) => {
            let (l, m) = inputs::parse_degrees(text)?;
            out.summarize("pade.m", m as f64);
            (l, analysis::pade_pole_probe(&series, (l, m))?)
        }
        None => {
            let l = n / 2;
            let (m, poles) = probe_adaptive(&series, l, 4)?;
            out.summarize("pade.m", m as f64);
            (l, poles)
        }
    };
    out.summarize("pade.l", l as f64);
    // Distances to products of the S poles, when probing D^{-1}.
    let products = if args.series == ProbeTarget::Dinv {
        let gens: Vec<Complex64> = probe_adaptive(&s, l, 4)?
            .1
            .into_iter()
            .filter(|p| p.stable && p.z.norm() > 1.0)
            .map(|p| p.z)
            .collect();
        let reach = poles.iter().map(|p| p.z.norm()).fold(0.0, f64::max);
        let max_gen = gens.iter().map(|g| g.norm()).fold(0.0, f64::max);
        if gens.is_empty() {
            None
        } else {
            Some(analysis::gset(&gens, None, (reach * 1.01).max(max_gen))?.elements)
        }
    } else {
        None
    };
    let mut t = Table::new("probe", &["re", "im", "modulus", "stable", "gset_distance"]);
    for p in &poles {
        let dist = products
            .as_ref()
            .and_then(|set| set.iter().map(|e| (e - p.z).norm()).min_by(f64::total_cmp))
            .map_or(Cell::Empty, num);
        t.push(vec![
            num(p.z.re),
            num(p.z.im),
            num(p.z.norm()),
            Cell::Bool(p.stable),
            dist,
        ]);
    }
    out.summarize("poles", poles.len() as f64);
    out.tables.push(t);
    Ok(out)
}

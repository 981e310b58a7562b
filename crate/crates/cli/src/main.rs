mod commands;
mod config;
mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{
    CarmonaArgs, CoeffsArgs, GsetArgs, JostArgs, PopucArgs, ProbeArgs, SzegoArgs, VerifyArgs,
};
use config::{ExperimentConfig, OutputFormat};

/// Orthogonal polynomial coefficients, Szegő and Jost functions, and decay checks.
#[derive(Parser, Debug)]
#[command(name = "opdecay", version)]
struct Cli {
    /// Configuration file (TOML); defaults to $OPDECAY_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Output format (overrides the configuration).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verblunsky coefficients or Jacobi parameters of a sequence or measure.
    Coeffs(CoeffsArgs),
    /// Taylor coefficients of the Szegő function and its inverse.
    Szego(SzegoArgs),
    /// Jost function coefficients and its zeros in the disk.
    Jost(JostArgs),
    /// Approximating densities and their moments against the spectral measure.
    Carmona(CarmonaArgs),
    /// Zeros and weights of a paraorthogonal polynomial.
    Popuc(PopucArgs),
    /// Run a verification suite; exits with status 1 if any check fails.
    Verify(VerifyArgs),
    /// Product set generated by points outside the disk.
    Gset(GsetArgs),
    /// Padé pole probe of a series.
    Probe(ProbeArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Coeffs(_) => "coeffs",
            Command::Szego(_) => "szego",
            Command::Jost(_) => "jost",
            Command::Carmona(_) => "carmona",
            Command::Popuc(_) => "popuc",
            Command::Verify(_) => "verify",
            Command::Gset(_) => "gset",
            Command::Probe(_) => "probe",
        }
    }

    fn order_override(&self) -> Option<usize> {
        match self {
            Command::Szego(a) => a.order,
            Command::Jost(a) => a.order,
            Command::Verify(a) => a.order,
            Command::Probe(a) => a.order,
            _ => None,
        }
    }

    fn stem(&self) -> String {
        match self {
            Command::Verify(a) => format!("verify_{}", a.suite.name().replace('-', "_")),
            other => other.name().to_string(),
        }
    }
}

/// Arguments as recorded in metadata: everything except the output directory.
fn recorded_arguments() -> Vec<String> {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            out.push(a);
        }
    }
    out
}

fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(n) = cli.command.order_override() {
        cfg.order = n;
        if let Some([_, hi]) = cfg.window {
            if hi > n {
                cfg.window = None;
            }
        }
    }
    cfg.validate()?;
    let outcome = match &cli.command {
        Command::Coeffs(a) => commands::coeffs(a, &cfg)?,
        Command::Szego(a) => commands::szego(a, &cfg)?,
        Command::Jost(a) => commands::jost(a, &cfg)?,
        Command::Carmona(a) => commands::carmona(a, &cfg)?,
        Command::Popuc(a) => commands::popuc(a, &cfg)?,
        Command::Verify(a) => commands::verify(a, &cfg)?,
        Command::Gset(a) => commands::gset(a)?,
        Command::Probe(a) => commands::probe(a, &cfg)?,
    };
    let written = output::write_outcome(
        &cli.out,
        &cli.command.stem(),
        cli.command.name(),
        &recorded_arguments(),
        &cfg,
        &outcome,
    )?;
    for p in &written {
        println!("{}", p.display());
    }
    let pass = outcome.report.as_ref().is_none_or(|r| r.pass);
    if let Some(r) = &outcome.report {
        println!("{}: {}", r.suite, if r.pass { "PASS" } else { "FAIL" });
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! `parakahler`: compatibility checks, surface synthesis, frame integration,
//! round-trip verification, Gauss maps and eigenspace decompositions from
//! the command line.
//!
//! Exit codes: 0 when every reported quantity is within tolerance, 1 on a
//! tolerance breach or numerical failure, 2 on bad usage or malformed input.

mod commands;
mod format;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parakahler::surface2d::Kind;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input; exit code 2.
    Input(String),
    /// Numerical failure inside the pipeline; exit code 1.
    Numerical(String),
    /// Reading or writing files; exit code 2.
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "parakahler",
    version,
    about = "Surfaces in the para-complex projective plane"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub cfg: RunConfig,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Compatibility residuals of surface data.
    Check,
    /// Solve the Tzitzeica equation from boundary values and build the surface.
    SynthesizeMinlag,
    /// Integrate the frame equations and report path independence.
    Integrate,
    /// Reconstruct the surface and compare recovered fields with the input.
    Verify,
    /// Gauss maps of the reconstructed frame with harmonicity certificates.
    Gauss,
    /// Split a matrix into the eigenspaces of the order-6 automorphism.
    Eigen,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// Input document (`parakahler/1` JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output document; written atomically. Defaults to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Plot-ready CSV of the surface (synthesize-minlag, verify).
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Tolerance on compatibility residuals and loop disagreement.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_flat: f64,
    /// Tolerance on round-trip errors.
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub tol_rt: f64,
    /// Tolerance of the primitivity certificates.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_cert: f64,
    /// Specialization: general, lagrangian, minimal or minlag.
    #[arg(long, global = true, value_parser = parse_kind)]
    pub kind: Option<Kind>,
    /// Sign of the ambient curvature, overriding the input file.
    #[arg(long = "H", global = true, allow_hyphen_values = true)]
    pub h: Option<i8>,
    /// Spectral parameter `re,im`; repeatable. Defaults to 1, i, e^{i pi/6}, -1.
    #[arg(long, global = true, value_parser = parse_complex)]
    pub lambda: Vec<parakahler::C64>,
    /// Order (6, 3 or 2) whose certificate decides the exit code of `gauss`.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Index 0..8 into the eigenspace basis table, instead of `--input` for `eigen`.
    #[arg(long, global = true)]
    pub basis: Option<usize>,
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse::<Kind>().map_err(|e| e.to_string())
}

fn parse_complex(s: &str) -> Result<parakahler::C64, String> {
    let (a, b) = s.split_once(',').ok_or("expected `re,im`")?;
    let re = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(parakahler::C64::new(re, im))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PARAKAHLER_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Input(format!(
            "PARAKAHLER_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli.command, &cli.cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("parakahler: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

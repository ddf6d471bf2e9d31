//! smoothrig command line.

pub mod commands;
pub mod io;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => EXIT_SOLVER,
            _ => EXIT_VALIDATION,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "smoothrig", version, about = "Remez constants and smooth rigidity of zero sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for generated fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nesting forest, domains and mu of an oval configuration.
    Decompose(DecomposeArgs),
    /// Sampled LP estimate of the Remez constant.
    RemezLp(RemezLpArgs),
    /// Closed-form Remez and rigidity bounds for a configuration.
    Bounds(BoundsArgs),
    /// Rigidity report for a configuration.
    Rigidity(RigidityArgs),
    /// One-dimensional divided-difference rigidity bound.
    #[command(name = "rigidity-1d")]
    Rigidity1d(Rigidity1dArgs),
    /// Fit a test curve and compare both sides of the composition inequality.
    CurveCheck(CurveCheckArgs),
    /// Box-counting dimension and the rigidity threshold.
    Boxdim(BoxdimArgs),
    /// Per-domain maxima, critical points and the Bezout count.
    VerifyProof(VerifyProofArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DecomposeArgs {
    /// Configuration JSON.
    #[arg(long, required_unless_present = "random")]
    pub config: Option<PathBuf>,
    /// Generate a random nested circle configuration with this many ovals.
    #[arg(long, conflicts_with = "config")]
    pub random: Option<usize>,
    /// Maximum nesting depth of a generated configuration.
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    /// Also write an SVG diagram.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Accept vertices outside the unit disk.
    #[arg(long)]
    pub allow_outside_ball: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RemezLpArgs {
    #[arg(long)]
    pub degree: usize,
    /// Sample set: CSV of points, or a configuration JSON whose boundaries are sampled.
    #[arg(long)]
    pub z: PathBuf,
    /// Candidate grid: k points of [-1,1] in one dimension, lattice step 2/k otherwise.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Explicit candidate points (CSV), replacing the grid.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    /// Boundary samples per oval when `--z` is a configuration.
    #[arg(long, default_value_t = 256)]
    pub samples_per_oval: usize,
    /// Solve the candidate programs on one thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub degree: usize,
    /// Measure fraction for the convex-body bound.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub allow_outside_ball: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RigidityArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub degree: usize,
    /// Add the bound from an LP estimate on sampled boundaries.
    #[arg(long)]
    pub lp: bool,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 256)]
    pub samples_per_oval: usize,
    #[arg(long)]
    pub allow_outside_ball: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct Rigidity1dArgs {
    /// Comma separated zeros.
    #[arg(long, allow_hyphen_values = true)]
    pub zeros: String,
    #[arg(long, allow_hyphen_values = true)]
    pub z0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub fz0: f64,
    #[arg(long)]
    pub degree: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveCheckArgs {
    /// Polynomial JSON.
    #[arg(long)]
    pub f: PathBuf,
    /// Points the curve passes through (CSV).
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, default_value_t = 512)]
    pub tgrid: usize,
    /// Count boundary crossings against this configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoxdimArgs {
    #[arg(long)]
    pub points: PathBuf,
    /// Comma separated, strictly decreasing; defaults to 2^-2 .. 2^-8.
    #[arg(long)]
    pub scales: Option<String>,
    #[arg(long)]
    pub degree: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyProofArgs {
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub degree: usize,
    /// Newton seeds per axis.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Perturbation size relative to the largest coefficient.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Interior lattice intervals per axis.
    #[arg(long, default_value_t = 128)]
    pub samples: usize,
    #[arg(long)]
    pub allow_outside_ball: bool,
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// Parses `argv` and runs the subcommand; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            match emit(cli.out.as_ref(), &text) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

// `!(v > 0.0)` guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command-line front end for the contact-dynamics toolkit.
//!
//! Exit codes: 0 success, 1 configuration or domain error, 2 numerical
//! failure, 3 verification failure.

mod commands;
mod config;
mod output;
mod verify;

use clap::{Args, Parser, Subcommand};
use contact_dynamics::Error as CoreError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "contact-dynamics",
    version,
    about = "Harmonic regularisation, universal damping and timestep bounds for 1-D contacts",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate each configured impact and write physical and transformed
    /// trajectory CSVs (conservative plus damped when damping is set)
    Simulate(CommonArgs),
    /// Map a recorded physical trajectory CSV into the virtual coordinates
    Transform(TransformArgs),
    /// Write the stability report (regime, gradient supremum, safe
    /// timestep) as JSON, one file per impact speed
    Bound(CommonArgs),
    /// Write the per-speed summary CSV: peak penetration (mm), peak force
    /// (N) and safe timestep (ms), six decimals
    Table1(CommonArgs),
    /// Write the action-variable report (E, q_max, J, dJ/dE, T) as JSON,
    /// one file per impact speed
    Action(CommonArgs),
    /// Write the physical damping-coefficient profile C(q) over a q-grid
    #[command(name = "damping-profile")]
    DampingProfile(DampingProfileArgs),
    /// Run the verification checks and write a JSON report; fails with
    /// exit code 3 when any check fails
    Verify(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario configuration (strict JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir; default ".")
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Relative tolerance of the reference integrator
    #[arg(long, default_value_t = 1e-13)]
    rtol: f64,
    /// Absolute tolerance of the reference integrator
    #[arg(long, default_value_t = 1e-13)]
    atol: f64,
    /// Reserved; every computation is deterministic
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Physical trajectory CSV (t,q,qdot,E) to transform
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct DampingProfileArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lower end of the q-grid (default: q_max(max v0) / 1000)
    #[arg(long)]
    q_min: Option<f64>,
    /// Upper end of the q-grid (default: q_max at the largest v0)
    #[arg(long)]
    q_max: Option<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 256)]
    points: usize,
}

/// CLI failure carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: configuration, domain or I/O problems.
    Config(String),
    /// Exit 2: numerical failure (quadrature, integration, degenerate bound).
    Numerical(String),
    /// Exit 3: verification checks failed.
    Verification(String),
}

impl CliError {
    pub fn config(msg: String) -> Self {
        CliError::Config(msg)
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::QuadratureFailure { .. }
            | CoreError::DegenerateBound
            | CoreError::RegimeMismatch { .. }
            | CoreError::NoExitDetected { .. }
            | CoreError::StepSizeUnderflow { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("I/O error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Transform(args) => commands::transform(args),
        Command::Bound(args) => commands::bound(args),
        Command::Table1(args) => commands::table1(args),
        Command::Action(args) => commands::action(args),
        Command::DampingProfile(args) => commands::damping_profile(args),
        Command::Verify(args) => verify::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

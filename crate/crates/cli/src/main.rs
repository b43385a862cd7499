use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod report;

/// Analyse closed convex curves in the plane, on the sphere and in the
/// hyperbolic plane, and check where their average curvature is attained.
#[derive(Debug, Parser)]
#[command(name = "fourpoint", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Curvature profile and mean-curvature attainment of one curve.
    Analyze,
    /// Equidistant fronts over a range of distances.
    Propagate,
    /// Theorem checks for one curve, or for a seeded random population
    /// when no input is given.
    Verify,
    /// Rounded-semicircle construction over a sweep of radii.
    Counterexample,
    /// Re-emit a curve in the requested formats.
    Export,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Opts {
    /// Curve-spec document (JSON).
    #[arg(long, global = true, env = "FOURPOINT_INPUT")]
    pub input: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(
        long,
        global = true,
        env = "FOURPOINT_OUT",
        default_value = "fourpoint-out"
    )]
    pub out: PathBuf,
    /// Samples per curve: a power of two, at least 64.
    #[arg(long, global = true, env = "FOURPOINT_SAMPLES")]
    pub samples: Option<usize>,
    /// Tolerance for the theorem checks.
    #[arg(long, global = true, env = "FOURPOINT_TOL", default_value_t = 1e-6)]
    pub tol: f64,
    /// Front distance: a value or a `start:stop:step` grid.
    #[arg(
        long = "t",
        global = true,
        env = "FOURPOINT_T",
        allow_hyphen_values = true
    )]
    pub t: Option<String>,
    /// Seed for random populations.
    #[arg(long, global = true, env = "FOURPOINT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Semicircle radius: a value or a `start:stop:step` grid.
    #[arg(long, global = true, env = "FOURPOINT_R", allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Artifact formats to write.
    #[arg(
        long,
        global = true,
        env = "FOURPOINT_FORMAT",
        value_delimiter = ',',
        default_value = "csv,svg,json"
    )]
    pub format: Vec<Format>,
    /// Run checks outside their hypotheses (reported, never counted as failures).
    #[arg(long, global = true, env = "FOURPOINT_FORCE")]
    pub force: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.opts) {
        Ok(commands::Status::Pass) => ExitCode::SUCCESS,
        Ok(commands::Status::CheckFailed) => {
            eprintln!(
                "a theorem check failed; see the report in {}",
                cli.opts.out.display()
            );
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

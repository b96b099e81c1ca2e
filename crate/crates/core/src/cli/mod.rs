//! Command-line front end: `solve`, `verify` and `bench`.
//!
//! Commands return an exit code instead of terminating the process so they
//! can be driven in-process from tests.

mod bench;
mod report;
mod solve;
mod trajectory_csv;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::AnalysisError;
use crate::ingest::{parse_rolling_stock, parse_route, IngestError, RollingStock, RouteProfile};
use crate::program::{ProgramError, TimeMode};
use crate::solver::{SolveStatus, SolverError};

pub use bench::{run_bench, write_bench_csv, BenchConfig, BenchRow, BENCH_HEADER, DEFAULT_SEGMENTS_LIST};
pub use report::{ExactnessSummary, InstanceSummary, RunReport, SimulationSummary, SolverSummary, RUN_REPORT_SCHEMA};
pub use solve::{solve_instance, SolveOutcome, SolveRequest};
pub use trajectory_csv::{
    format_significant, read_trajectory_csv, trajectory_rows, write_trajectory_csv, TrajectoryRow,
    TRAJECTORY_HEADER,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "eetc", version, about = "Energy-efficient train control via second-order-cone programming")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write the trajectory and a run report.
    Solve(SolveArgs),
    /// Recompute energy and running time of a trajectory CSV.
    Verify(VerifyArgs),
    /// Solve the synthetic instance over a sweep of segment counts.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub route: PathBuf,
    #[arg(long)]
    pub stock: PathBuf,
    /// Scheduled running time, s.
    #[arg(long)]
    pub time: f64,
    #[arg(long)]
    pub segments: usize,
    #[arg(long, default_value_t = TimeMode::Endpoint)]
    pub mode: TimeMode,
    /// Departure speed, m/s.
    #[arg(long, default_value_t = 0.0)]
    pub start_speed: f64,
    /// Arrival speed, m/s; defaults to 0.5 (endpoint) or 0 (trapezoidal).
    #[arg(long)]
    pub end_speed: Option<f64>,
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Trajectory CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run report JSON output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Log one line per solver iteration.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub trajectory: PathBuf,
    #[arg(long)]
    pub stock: PathBuf,
    #[arg(long)]
    pub route: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Route JSON; the built-in flat 2707 m route if omitted.
    #[arg(long)]
    pub route: Option<PathBuf>,
    /// Stock JSON; the built-in metro stock if omitted.
    #[arg(long)]
    pub stock: Option<PathBuf>,
    #[arg(long, default_value_t = crate::fixtures::SYNTHETIC_TIME_S)]
    pub time: f64,
    #[arg(long, default_value_t = TimeMode::Endpoint)]
    pub mode: TimeMode,
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_SEGMENTS_LIST)]
    pub segments_list: Vec<usize>,
    /// Per-solve cutoff, s; slower rows are marked TIMEOUT.
    #[arg(long, default_value_t = 100.0)]
    pub time_limit: f64,
    /// Run the solves concurrently; timings are then marked `parallel`.
    #[arg(long)]
    pub parallel: bool,
    /// Solves per segment count; the median wall time is reported.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: IngestError },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("malformed trajectory CSV: {0}")]
    Csv(String),
    #[error("{0}")]
    Usage(String),
    #[error("solver stopped with status {0}")]
    Status(SolveStatus),
    #[error("run report: {0}")]
    Report(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Program(ProgramError::InfeasibleTime { .. }) => EXIT_INFEASIBLE,
            CliError::Program(ProgramError::NonOptimal(s)) | CliError::Status(s) => status_exit_code(*s),
            CliError::Program(ProgramError::Dimension(_) | ProgramError::HyperbolicConstant(_)) => EXIT_NUMERICAL,
            CliError::Program(_) => EXIT_USAGE,
            CliError::Solver(SolverError::Settings(_)) => EXIT_USAGE,
            CliError::Solver(_) | CliError::Report(_) => EXIT_NUMERICAL,
            CliError::Io { .. }
            | CliError::Input { .. }
            | CliError::Ingest(_)
            | CliError::Analysis(_)
            | CliError::Csv(_)
            | CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

pub fn status_exit_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => EXIT_OK,
        SolveStatus::PrimalInfeasible => EXIT_INFEASIBLE,
        SolveStatus::DualInfeasible
        | SolveStatus::IterationLimit
        | SolveStatus::TimeLimit
        | SolveStatus::NumericalError => EXIT_NUMERICAL,
    }
}

/// Runs a parsed command, printing results to stdout and errors to stderr.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Solve(args) => solve::cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => bench::cmd_bench(&args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let stock = load_stock(&args.stock)?;
    let route = load_route(&args.route)?;
    let text = read_file(&args.trajectory)?;
    let points = read_trajectory_csv(&text)?;
    let d_end = points.last().map_or(0.0, |p| p.0);
    let tol = 1e-6 * route.total_distance_m();
    if points.first().is_some_and(|p| p.0 < -tol) || d_end > route.total_distance_m() + tol {
        return Err(CliError::Csv(format!(
            "distances must lie within the route [0, {}] m",
            route.total_distance_m()
        )));
    }
    let sim = crate::analysis::simulate_on_profile(&points, &stock, &route)?;
    println!("t = {:.3} s", sim.running_time_s);
    println!("e = {:.4} kWh", sim.energy_kwh);
    Ok(())
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn load_stock(path: &Path) -> Result<RollingStock<f64>, CliError> {
    parse_rolling_stock(&read_file(path)?).map_err(|source| CliError::Input {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn load_route(path: &Path) -> Result<RouteProfile, CliError> {
    parse_route(&read_file(path)?).map_err(|source| CliError::Input {
        path: path.to_owned(),
        source,
    })
}

use std::time::Instant;

use super::report::{ExactnessSummary, InstanceSummary, RunReport, SimulationSummary, SolverSummary};
use super::trajectory_csv::{format_significant, trajectory_rows, write_trajectory_csv, TrajectoryRow};
use super::{load_route, load_stock, write_file, CliError, SolveArgs};
use crate::analysis::{
    check_exactness, consistency_report, simulate_on_profile, ConsistencyReport, ExactnessReport,
    SimulationResult,
};
use crate::ingest::{discretize, Boundaries, DiscretizedRoute, RollingStock, RouteProfile};
use crate::program::{build_program, extract_trajectory, TimeMode, Trajectory};
use crate::solver::{solve, SolveStatus, SolverSettings};

/// Everything needed to solve one instance.
#[derive(Debug, Clone)]
pub struct SolveRequest {
    pub route: RouteProfile,
    pub stock: RollingStock<f64>,
    pub time_s: f64,
    pub segments: usize,
    pub mode: TimeMode,
    pub boundaries: Boundaries,
    pub settings: SolverSettings<f64>,
}

impl SolveRequest {
    /// Arrival speed used when none is given: trapezoidal mode can stop
    /// exactly, endpoint mode needs a positive terminal speed.
    pub fn default_end_speed(mode: TimeMode) -> f64 {
        match mode {
            TimeMode::Endpoint => 0.5,
            TimeMode::Trapezoidal => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub discretized: DiscretizedRoute<f64>,
    pub trajectory: Trajectory<f64>,
    pub rows: Vec<TrajectoryRow>,
    /// Simulation of the speeds as written to the CSV, so that `verify` on the
    /// written file reproduces it exactly.
    pub simulation: SimulationResult<f64>,
    pub exactness: ExactnessReport<f64>,
    pub consistency: ConsistencyReport,
    /// Seconds spent inside the solver call alone.
    pub wall_time_s: f64,
    pub report: RunReport,
}

/// Discretizes, builds, solves and checks one instance.
///
/// A non-optimal solver status is returned as [`CliError::Status`].
pub fn solve_instance(req: &SolveRequest) -> Result<SolveOutcome, CliError> {
    let discretized: DiscretizedRoute<f64> = discretize(&req.route, req.segments, req.boundaries)?;
    let (program, map) = build_program(&req.stock, &discretized, req.time_s, req.mode)?;
    let start = Instant::now();
    let solution = solve(&program, &req.settings)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    if solution.status != SolveStatus::Optimal {
        return Err(CliError::Status(solution.status));
    }
    let trajectory = extract_trajectory(&solution, &map, &discretized)?;
    let exactness = check_exactness(&trajectory)?;
    let rows = trajectory_rows(&trajectory, &discretized, &req.route);
    let written: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (reparse(r.distance_m), reparse(r.speed_mps)))
        .collect();
    let simulation = simulate_on_profile(&written, &req.stock, &req.route)?;
    let consistency = consistency_report(&trajectory, &simulation, req.time_s);
    let report = RunReport {
        instance: InstanceSummary {
            distance_m: req.route.total_distance_m(),
            time_s: req.time_s,
            segments: req.segments,
            mode: req.mode.to_string(),
            start_speed_mps: req.boundaries.start_mps,
            end_speed_mps: req.boundaries.end_mps,
        },
        objective_kwh: trajectory.objective_kwh,
        simulated: SimulationSummary {
            energy_kwh: simulation.energy_kwh,
            time_s: simulation.running_time_s,
        },
        exactness: ExactnessSummary {
            max_alpha_dev_rel: exactness.max_alpha_dev_rel,
            max_beta_dev_rel: exactness.max_beta_dev_rel,
            alpha_argmax: exactness.alpha_argmax,
            beta_argmax: exactness.beta_argmax,
        },
        solver: SolverSummary {
            status: solution.status.to_string(),
            iterations: solution.iterations,
            gap: solution.gap,
            wall_time_s,
        },
    };
    Ok(SolveOutcome {
        discretized,
        trajectory,
        rows,
        simulation,
        exactness,
        consistency,
        wall_time_s,
        report,
    })
}

fn reparse(x: f64) -> f64 {
    format_significant(x).parse().unwrap_or(x)
}

pub(super) fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    if args.segments < 2 {
        return Err(CliError::Usage(format!("--segments must be at least 2, got {}", args.segments)));
    }
    let mut settings = SolverSettings::<f64> {
        verbose: args.verbose,
        ..SolverSettings::default()
    };
    if let Some(tol) = args.gap_tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Usage(format!("--gap-tol must lie in (0, 1), got {tol}")));
        }
        settings.gap_tol = tol;
    }
    let req = SolveRequest {
        route: load_route(&args.route)?,
        stock: load_stock(&args.stock)?,
        time_s: args.time,
        segments: args.segments,
        mode: args.mode,
        boundaries: Boundaries::new(
            args.start_speed,
            args.end_speed.unwrap_or_else(|| SolveRequest::default_end_speed(args.mode)),
        ),
        settings,
    };
    let outcome = solve_instance(&req)?;
    let json = outcome.report.to_json()?;
    if let Some(path) = &args.out {
        write_file(path, &write_trajectory_csv(&outcome.rows)?)?;
    }
    if let Some(path) = &args.report {
        write_file(path, &json)?;
    }
    let r = &outcome.report;
    println!(
        "{} segments, {} mode: {} after {} iterations in {:.3} s",
        r.instance.segments, r.instance.mode, r.solver.status, r.solver.iterations, r.solver.wall_time_s
    );
    println!("{}", outcome.consistency);
    println!(
        "max relative deviation: alpha {:.3e} (segment {}), beta {:.3e} (point {})",
        r.exactness.max_alpha_dev_rel,
        r.exactness.alpha_argmax,
        r.exactness.max_beta_dev_rel,
        r.exactness.beta_argmax
    );
    Ok(())
}

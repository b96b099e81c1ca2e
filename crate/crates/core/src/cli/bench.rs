use std::time::Instant;

use super::{load_route, load_stock, write_file, BenchArgs, CliError, SolveRequest};
use crate::fixtures::{metro_stock, synthetic_route};
use crate::ingest::{discretize, Boundaries, DiscretizedRoute, RollingStock, RouteProfile};
use crate::program::{build_program, extract_trajectory, TimeMode};
use crate::solver::{solve, SolveStatus, SolverSettings};

pub const DEFAULT_SEGMENTS_LIST: &str = "25,50,100,250,500,1000,2500,5000,10000";
pub const BENCH_HEADER: [&str; 6] = ["N", "status", "objective_kWh", "iterations", "wall_s", "timing"];
const TIMEOUT: &str = "TIMEOUT";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub route: RouteProfile,
    pub stock: RollingStock<f64>,
    pub time_s: f64,
    pub mode: TimeMode,
    pub boundaries: Boundaries,
    pub segments: Vec<usize>,
    pub time_limit_s: f64,
    pub parallel: bool,
    pub repeats: usize,
}

impl BenchConfig {
    /// The synthetic flat instance over the default sweep.
    pub fn synthetic() -> Self {
        Self {
            route: synthetic_route(),
            stock: metro_stock(),
            time_s: crate::fixtures::SYNTHETIC_TIME_S,
            mode: TimeMode::Endpoint,
            boundaries: Boundaries::new(0.0, SolveRequest::default_end_speed(TimeMode::Endpoint)),
            segments: parse_list(DEFAULT_SEGMENTS_LIST).expect("default list parses"),
            time_limit_s: 100.0,
            parallel: false,
            repeats: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub segments: usize,
    /// Solver status, or `TIMEOUT` when the cutoff was exceeded.
    pub status: String,
    pub objective_kwh: Option<f64>,
    pub iterations: usize,
    /// Median over the repeats of the time spent in the solver call.
    pub wall_s: f64,
    pub parallel: bool,
}

impl BenchRow {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal.as_str()
    }

    pub fn timed_out(&self) -> bool {
        self.status == TIMEOUT
    }
}

fn parse_list(s: &str) -> Option<Vec<usize>> {
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

struct Sample {
    status: SolveStatus,
    objective_kwh: Option<f64>,
    iterations: usize,
    wall_s: f64,
}

fn run_once(
    cfg: &BenchConfig,
    route: &DiscretizedRoute<f64>,
    settings: &SolverSettings<f64>,
) -> Result<Sample, CliError> {
    let (program, map) = build_program(&cfg.stock, route, cfg.time_s, cfg.mode)?;
    let start = Instant::now();
    let solution = solve(&program, settings)?;
    let wall_s = start.elapsed().as_secs_f64();
    let objective_kwh = match solution.status {
        SolveStatus::Optimal => Some(extract_trajectory(&solution, &map, route)?.objective_kwh),
        _ => None,
    };
    Ok(Sample {
        status: solution.status,
        objective_kwh,
        iterations: solution.iterations,
        wall_s,
    })
}

fn bench_one(cfg: &BenchConfig, n: usize) -> Result<BenchRow, CliError> {
    let route: DiscretizedRoute<f64> = discretize(&cfg.route, n, cfg.boundaries)?;
    let settings = SolverSettings {
        time_limit_s: Some(cfg.time_limit_s),
        ..SolverSettings::default()
    };
    let mut samples = (0..cfg.repeats)
        .map(|_| run_once(cfg, &route, &settings))
        .collect::<Result<Vec<_>, _>>()?;
    samples.sort_by(|a, b| a.wall_s.total_cmp(&b.wall_s));
    let median = &samples[samples.len() / 2];
    let worst = samples
        .iter()
        .find(|s| s.status != SolveStatus::Optimal)
        .unwrap_or(median);
    let timed_out = worst.status == SolveStatus::TimeLimit || median.wall_s > cfg.time_limit_s;
    Ok(BenchRow {
        segments: n,
        status: if timed_out {
            TIMEOUT.to_string()
        } else {
            worst.status.to_string()
        },
        objective_kwh: if timed_out { None } else { worst.objective_kwh },
        iterations: worst.iterations,
        wall_s: median.wall_s,
        parallel: cfg.parallel,
    })
}

/// Solves the instance for each segment count, one row per count in input
/// order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    if cfg.segments.is_empty() {
        return Err(CliError::Usage("--segments-list is empty".into()));
    }
    if cfg.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    if !(cfg.time_limit_s > 0.0) {
        return Err(CliError::Usage(format!("--time-limit must be positive, got {}", cfg.time_limit_s)));
    }
    if cfg.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cfg
                .segments
                .iter()
                .map(|&n| scope.spawn(move || bench_one(cfg, n)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench worker panicked"))
                .collect()
        })
    } else {
        cfg.segments.iter().map(|&n| bench_one(cfg, n)).collect()
    }
}

pub fn write_bench_csv(rows: &[BenchRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Csv(e.to_string());
    w.write_record(BENCH_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.segments.to_string(),
            r.status.clone(),
            r.objective_kwh.map(|e| format!("{e:.6}")).unwrap_or_default(),
            r.iterations.to_string(),
            format!("{:.6}", r.wall_s),
            if r.parallel { "parallel" } else { "sequential" }.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Csv(e.to_string()))
}

pub(super) fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let mut cfg = BenchConfig::synthetic();
    if let Some(path) = &args.route {
        cfg.route = load_route(path)?;
    }
    if let Some(path) = &args.stock {
        cfg.stock = load_stock(path)?;
    }
    cfg.time_s = args.time;
    cfg.mode = args.mode;
    cfg.boundaries = Boundaries::new(0.0, SolveRequest::default_end_speed(args.mode));
    cfg.segments = args.segments_list.clone();
    cfg.time_limit_s = args.time_limit;
    cfg.parallel = args.parallel;
    cfg.repeats = args.repeats;

    let rows = run_bench(&cfg)?;
    let csv = write_bench_csv(&rows)?;
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    for r in &rows {
        log::info!("N = {}: {} in {:.3} s", r.segments, r.status, r.wall_s);
    }
    Ok(())
}

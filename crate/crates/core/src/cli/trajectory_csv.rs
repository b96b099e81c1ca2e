use super::CliError;
use crate::ingest::{DiscretizedRoute, RouteProfile};
use crate::program::Trajectory;

pub const TRAJECTORY_HEADER: [&str; 9] = [
    "index",
    "distance_m",
    "speed_mps",
    "speed_limit_mps",
    "gradient_permille",
    "alpha_s_per_m",
    "beta_m2_per_s2",
    "force_N",
    "energy_J",
];

const SIGNIFICANT_DIGITS: i32 = 9;
const MAX_DECIMALS: i32 = 24;

/// One CSV line. Segment quantities are `None` on row 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub index: usize,
    pub distance_m: f64,
    pub speed_mps: f64,
    pub speed_limit_mps: f64,
    pub gradient_permille: f64,
    pub alpha_s_per_m: Option<f64>,
    pub beta_m2_per_s2: f64,
    pub force_n: Option<f64>,
    pub energy_j: Option<f64>,
}

/// Decimal (never exponent) notation with 9 significant digits.
pub fn format_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS - 1 - magnitude).clamp(0, MAX_DECIMALS) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99999999995 → 10.00000000)
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if digits > SIGNIFICANT_DIGITS as usize && decimals > 0 {
        format!("{x:.0$}", decimals - 1)
    } else {
        s
    }
}

/// Tabulates a trajectory. Row `i ≥ 1` carries the quantities of segment
/// `i`, whose mean gradient is reported; row 0 reports the gradient at the
/// departure point.
pub fn trajectory_rows(
    traj: &Trajectory<f64>,
    discretized: &DiscretizedRoute<f64>,
    profile: &RouteProfile,
) -> Vec<TrajectoryRow> {
    let gradients = discretized.segment_gradient_permille();
    (0..=traj.n_segments())
        .map(|i| {
            let seg = i.checked_sub(1);
            TrajectoryRow {
                index: i,
                distance_m: traj.distances_m[i],
                speed_mps: traj.speeds_mps[i],
                speed_limit_mps: discretized.point_speed_limit_mps[i],
                gradient_permille: seg.map_or_else(|| profile.gradient_at(0.0), |s| gradients[s]),
                alpha_s_per_m: seg.map(|s| traj.alphas_s_per_m[s]),
                beta_m2_per_s2: traj.betas_m2_per_s2[i],
                force_n: seg.map(|s| traj.efforts_n[s]),
                energy_j: seg.map(|s| traj.energies_j[s]),
            }
        })
        .collect()
}

pub fn write_trajectory_csv(rows: &[TrajectoryRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Csv(e.to_string());
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err)?;
    let opt = |x: Option<f64>| x.map(format_significant).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.index.to_string(),
            format_significant(r.distance_m),
            format_significant(r.speed_mps),
            format_significant(r.speed_limit_mps),
            format_significant(r.gradient_permille),
            opt(r.alpha_s_per_m),
            format_significant(r.beta_m2_per_s2),
            opt(r.force_n),
            opt(r.energy_j),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Csv(e.to_string()))
}

/// Reads `(distance_m, speed_mps)` pairs; other columns are ignored, so a
/// two-column file is accepted as well.
pub fn read_trajectory_csv(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| CliError::Csv(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Csv(format!("missing column `{name}`")))
    };
    let (d_col, v_col) = (column("distance_m")?, column("speed_mps")?);
    let mut points = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| CliError::Csv(e.to_string()))?;
        let field = |col: usize, name: &str| -> Result<f64, CliError> {
            let raw = record.get(col).unwrap_or("").trim();
            raw.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Csv(format!("row {}: `{name}` = {raw:?} is not a number", line + 1)))
        };
        points.push((field(d_col, "distance_m")?, field(v_col, "speed_mps")?));
    }
    Ok(points)
}

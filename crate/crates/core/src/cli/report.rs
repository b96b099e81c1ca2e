use serde::{Deserialize, Serialize};

use super::CliError;

/// JSON Schema (draft 2020-12) for [`RunReport`].
pub const RUN_REPORT_SCHEMA: &str = include_str!("../../schema/run_report.schema.json");

/// Summary of one `solve` run: instance, energy and time figures, exactness
/// and solver statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: InstanceSummary,
    #[serde(rename = "objective_kWh")]
    pub objective_kwh: f64,
    pub simulated: SimulationSummary,
    pub exactness: ExactnessSummary,
    pub solver: SolverSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub distance_m: f64,
    pub time_s: f64,
    pub segments: usize,
    pub mode: String,
    pub start_speed_mps: f64,
    pub end_speed_mps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    #[serde(rename = "energy_kWh")]
    pub energy_kwh: f64,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessSummary {
    pub max_alpha_dev_rel: f64,
    pub max_beta_dev_rel: f64,
    /// 1-based segment of the largest α deviation.
    pub alpha_argmax: usize,
    /// 1-based point of the largest β deviation.
    pub beta_argmax: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub status: String,
    pub iterations: usize,
    pub gap: f64,
    pub wall_time_s: f64,
}

impl RunReport {
    fn floats(&self) -> [(&'static str, f64); 11] {
        [
            ("instance.distance_m", self.instance.distance_m),
            ("instance.time_s", self.instance.time_s),
            ("instance.start_speed_mps", self.instance.start_speed_mps),
            ("instance.end_speed_mps", self.instance.end_speed_mps),
            ("objective_kWh", self.objective_kwh),
            ("simulated.energy_kWh", self.simulated.energy_kwh),
            ("simulated.time_s", self.simulated.time_s),
            ("exactness.max_alpha_dev_rel", self.exactness.max_alpha_dev_rel),
            ("exactness.max_beta_dev_rel", self.exactness.max_beta_dev_rel),
            ("solver.gap", self.solver.gap),
            ("solver.wall_time_s", self.solver.wall_time_s),
        ]
    }

    /// Pretty JSON; fails if any float is NaN or infinite.
    pub fn to_json(&self) -> Result<String, CliError> {
        if let Some((name, v)) = self.floats().into_iter().find(|(_, v)| !v.is_finite()) {
            return Err(CliError::Report(format!("`{name}` is not finite ({v})")));
        }
        serde_json::to_string_pretty(self).map_err(|e| CliError::Report(e.to_string()))
    }
}

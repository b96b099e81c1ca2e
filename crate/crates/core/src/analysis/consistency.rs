use std::fmt;

use super::SimulationResult;
use crate::program::Trajectory;
use crate::scalar::{to_f64, Scalar};

/// Model versus simulation, laid out as the rows of a results table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    pub objective_kwh: f64,
    pub simulated_energy_kwh: f64,
    /// `simulated − objective`.
    pub energy_diff_kwh: f64,
    pub target_time_s: f64,
    pub simulated_time_s: f64,
    /// `simulated − target`.
    pub time_diff_s: f64,
}

impl ConsistencyReport {
    pub fn energy_rel_diff(&self) -> f64 {
        self.energy_diff_kwh.abs() / self.objective_kwh.abs()
    }
}

pub fn consistency_report<T: Scalar>(
    traj: &Trajectory<T>,
    sim: &SimulationResult<T>,
    target_time_s: f64,
) -> ConsistencyReport {
    let objective_kwh = to_f64(traj.objective_kwh);
    let simulated_energy_kwh = to_f64(sim.energy_kwh);
    let simulated_time_s = to_f64(sim.running_time_s);
    ConsistencyReport {
        objective_kwh,
        simulated_energy_kwh,
        energy_diff_kwh: simulated_energy_kwh - objective_kwh,
        target_time_s,
        simulated_time_s,
        time_diff_s: simulated_time_s - target_time_s,
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<36}{:>12.3}", "Objective function value (kWh)", self.objective_kwh)?;
        writeln!(f, "{:<36}{:>12.3}", "Simulated energy consumption (kWh)", self.simulated_energy_kwh)?;
        writeln!(f, "{:<36}{:>+12.3}", "Difference (kWh)", self.energy_diff_kwh)?;
        writeln!(f, "{:<36}{:>12.3}", "Target running time (s)", self.target_time_s)?;
        writeln!(f, "{:<36}{:>12.3}", "Simulated running time (s)", self.simulated_time_s)?;
        write!(f, "{:<36}{:>+12.3}", "Difference (s)", self.time_diff_s)
    }
}

use super::build::{TimeMode, VariableMap};
use super::ProgramError;
use crate::ingest::DiscretizedRoute;
use crate::scalar::{lit, Scalar};
use crate::solver::{ConicSolution, SolveStatus};

/// Optimal speed profile and controls over the journey.
///
/// Point quantities (`distances`, `speeds`, `betas`) have `N + 1` entries
/// with the fixed start at index 0; segment quantities (`alphas`, `efforts`,
/// `energies`) have `N` entries, entry `i − 1` belonging to segment `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub distances_m: Vec<T>,
    pub speeds_mps: Vec<T>,
    pub alphas_s_per_m: Vec<T>,
    pub betas_m2_per_s2: Vec<T>,
    pub efforts_n: Vec<T>,
    pub energies_j: Vec<T>,
    pub objective_kwh: T,
    pub mode: TimeMode,
    pub iterations: usize,
    pub gap: T,
    pub solve_time_s: f64,
}

impl<T: Scalar> Trajectory<T> {
    pub fn n_segments(&self) -> usize {
        self.efforts_n.len()
    }

    pub fn objective_j(&self) -> T {
        self.objective_kwh * lit(3.6e6)
    }
}

pub fn extract_trajectory<T: Scalar>(
    solution: &ConicSolution<T>,
    map: &VariableMap,
    route: &DiscretizedRoute<T>,
) -> Result<Trajectory<T>, ProgramError> {
    if solution.status != SolveStatus::Optimal {
        return Err(ProgramError::NonOptimal(solution.status));
    }
    if solution.x.len() != map.total() || route.n_segments != map.n_segments {
        return Err(ProgramError::Dimension(format!(
            "solution has {} entries, map expects {} for {} segments",
            solution.x.len(),
            map.total(),
            map.n_segments
        )));
    }
    let x = &map.to_physical(&solution.x);
    let v0 = route.start_speed_mps;
    let mut speeds: Vec<T> = std::iter::once(v0).chain(x[map.speed.clone()].iter().copied()).collect();
    if map.mode == TimeMode::Trapezoidal {
        // pinned by an equality row; drop the solver's rounding
        speeds[map.n_segments] = route.end_speed_mps;
    }
    let betas = std::iter::once(v0 * v0)
        .chain(x[map.beta.clone()].iter().copied())
        .collect();
    let energies: Vec<T> = x[map.energy.clone()].to_vec();
    let total: T = energies.iter().copied().sum();
    Ok(Trajectory {
        distances_m: route.distances(),
        speeds_mps: speeds,
        alphas_s_per_m: x[map.alpha.clone()].to_vec(),
        betas_m2_per_s2: betas,
        efforts_n: x[map.force.clone()].to_vec(),
        energies_j: energies,
        objective_kwh: total / lit(3.6e6),
        mode: map.mode,
        iterations: solution.iterations,
        gap: solution.gap,
        solve_time_s: solution.solve_time_s,
    })
}

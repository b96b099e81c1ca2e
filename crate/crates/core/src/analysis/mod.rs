//! Post-solve checks: relaxation tightness and an independent recomputation
//! of energy and running time from the speed profile alone.

mod consistency;
mod exactness;
mod simulate;

pub use consistency::{consistency_report, ConsistencyReport};
pub use exactness::{check_exactness, ExactnessReport};
pub use simulate::{simulate, simulate_on_profile, SegmentEnergy, SimulationResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("need at least two speed points, got {0}")]
    TooFewPoints(usize),
    #[error("{points} speed points do not match a route of {segments} segments")]
    LengthMismatch { points: usize, segments: usize },
    #[error("distance must increase strictly, violated at point {0}")]
    NonIncreasingDistance(usize),
    #[error("negative or non-finite speed at point {0}")]
    InvalidSpeed(usize),
    #[error("zero average speed on step {0}: running time undefined")]
    ZeroAverageSpeed(usize),
    #[error("zero speed at point {0}: relative deviation undefined")]
    ZeroSpeed(usize),
}

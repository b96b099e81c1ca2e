//! The relaxed EETC model as a conic program, and the way back to a
//! physical trajectory.

mod build;
mod conic;
mod hyperbolic;
mod trajectory;

pub use build::{build_program, minimum_time_bound, TimeMode, VariableMap, SPEED_FLOOR_MPS};
pub use conic::{AffineExpr, Cone, ConicBuilder, ConicProgram};
pub use hyperbolic::{hyperbolic_cone_rows, ConeBlock};
pub use trajectory::{extract_trajectory, Trajectory};

use crate::solver::SolveStatus;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProgramError {
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("journey time must be positive and finite, got {0} s")]
    InvalidTime(f64),
    #[error(
        "journey time {time_s} s is infeasible: running every segment at its speed limit takes {min_time_s:.3} s"
    )]
    InfeasibleTime { time_s: f64, min_time_s: f64 },
    #[error("endpoint mode needs a positive terminal speed (segment time is Δd/v_N)")]
    EndpointZeroTerminal,
    #[error("hyperbolic constraint u·w ≥ c² needs c > 0 when c is constant, got {0}")]
    HyperbolicConstant(f64),
    #[error("solution status is {0}, not Optimal")]
    NonOptimal(SolveStatus),
}

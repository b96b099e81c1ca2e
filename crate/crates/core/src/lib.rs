//! Energy-efficient train control as a second-order-cone program.
//!
//! The pipeline is `ingest` (parse and discretize) → `program` (relaxed
//! conic model) → `solver` (interior-point method) → `analysis` (exactness
//! and independent simulation). Everything numeric is generic over
//! [`Scalar`], implemented for `f32` and `f64`; the aliases below fix `f64`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod fixtures;
pub mod ingest;
pub mod program;
pub mod scalar;
pub mod solver;

pub use scalar::Scalar;

pub type RollingStock = ingest::RollingStock<f64>;
pub type DiscretizedRoute = ingest::DiscretizedRoute<f64>;
pub type ConicProgram = program::ConicProgram<f64>;
pub type Trajectory = program::Trajectory<f64>;
pub type SolverSettings = solver::SolverSettings<f64>;
pub type ConicSolution = solver::ConicSolution<f64>;

pub type RollingStockF32 = ingest::RollingStock<f32>;
pub type DiscretizedRouteF32 = ingest::DiscretizedRoute<f32>;
pub type ConicProgramF32 = program::ConicProgram<f32>;
pub type TrajectoryF32 = program::Trajectory<f32>;
pub type SolverSettingsF32 = solver::SolverSettings<f32>;
pub type ConicSolutionF32 = solver::ConicSolution<f32>;

//! Primal-dual interior-point solver for linear / second-order-cone programs.
//!
//! The iteration works on the homogeneous self-dual embedding of
//!
//! ```text
//! min cᵀx  s.t.  A x + s = b,  s ∈ {0}ᵖ × K
//! ```
//!
//! where the zero cone carries the equalities, with Nesterov–Todd scaling and
//! a Mehrotra predictor-corrector step. Newton systems are solved with a
//! sparse quasi-definite LDLᵀ factorization plus iterative refinement.

mod cones;
mod csc;
mod equilibrate;
mod ipm;
mod kkt;
mod ldl;
mod residuals;

pub use csc::CscMatrix;
pub use ldl::{sym_upper_matvec, DynamicRegularization, LdlError, LdlFactorization};
pub use residuals::{residuals, ResidualReport};

use crate::program::ConicProgram;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings<T> {
    /// Relative duality gap for optimality.
    pub gap_tol: T,
    /// Relative primal/dual residual for optimality and infeasibility certificates.
    pub feas_tol: T,
    pub max_iterations: usize,
    pub static_regularization: T,
    /// Wall-clock budget in seconds; `None` means unlimited.
    pub time_limit_s: Option<f64>,
    /// One log line (via `log::info!`) per iteration.
    pub verbose: bool,
    /// Ruiz equilibration of the constraint data before iterating.
    pub equilibrate: bool,
    pub max_refinement_steps: usize,
}

impl<T: Scalar> Default for SolverSettings<T> {
    fn default() -> Self {
        Self {
            gap_tol: T::default_tolerance(),
            feas_tol: T::default_tolerance(),
            max_iterations: 200,
            static_regularization: lit(1e-9),
            time_limit_s: None,
            verbose: false,
            equilibrate: true,
            max_refinement_steps: 10,
        }
    }
}

impl<T: Scalar> SolverSettings<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.gap_tol > T::zero() && self.feas_tol > T::zero()) {
            return Err(SolverError::Settings("tolerances must be positive"));
        }
        if !(self.static_regularization > T::zero()) {
            return Err(SolverError::Settings("static regularization must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::Settings("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IterationLimit,
    TimeLimit,
    NumericalError,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::PrimalInfeasible => "PrimalInfeasible",
            SolveStatus::DualInfeasible => "DualInfeasible",
            SolveStatus::IterationLimit => "IterationLimit",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::NumericalError => "NumericalError",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solver output in the coordinates of the original [`ConicProgram`].
///
/// For `PrimalInfeasible`, `(y, z)` is a certificate normalized to
/// `b_eqᵀy + hᵀz = -1`; for `DualInfeasible`, `(x, s)` is a ray normalized to
/// `cᵀx = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution<T> {
    pub status: SolveStatus,
    pub x: Vec<T>,
    /// Equality multipliers.
    pub y: Vec<T>,
    /// Cone multipliers, in the dual cone of each block.
    pub z: Vec<T>,
    pub s: Vec<T>,
    pub primal_objective: T,
    pub gap: T,
    pub eq_residual: T,
    pub cone_residual: T,
    pub dual_residual: T,
    pub iterations: usize,
    pub solve_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid program: {0}")]
    Program(String),
    #[error("invalid settings: {0}")]
    Settings(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Solves `program` to the tolerances in `settings`.
///
/// Only malformed input is an `Err`; every outcome of the iteration itself,
/// including infeasibility and numerical failure, is reported through
/// [`ConicSolution::status`].
pub fn solve<T: Scalar>(
    program: &ConicProgram<T>,
    settings: &SolverSettings<T>,
) -> Result<ConicSolution<T>, SolverError> {
    program
        .validate()
        .map_err(|e| SolverError::Program(e.to_string()))?;
    settings.validate()?;
    Ok(ipm::Solver::new(program, settings).run())
}

#[cfg(test)]
mod tests;

use super::{ConicSolution, SolverError};
use crate::program::ConicProgram;
use crate::scalar::{dot, norm_inf, Scalar};

/// Optimality measures recomputed from the program data and a primal-dual
/// point, independent of any solver state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport<T> {
    /// `‖A_eq x − b_eq‖∞ / (1 + ‖b_eq‖∞)`
    pub eq_residual: T,
    /// `‖G x + s − h‖∞ / (1 + ‖h‖∞)`
    pub cone_residual: T,
    /// `‖c + A_eqᵀ y + Gᵀ z‖∞ / (1 + ‖c‖∞)`
    pub dual_residual: T,
    /// `|cᵀx + b_eqᵀy + hᵀz| / (1 + |cᵀx|)`
    pub gap: T,
    pub primal_objective: T,
    pub dual_objective: T,
    /// Smallest cone margin of `s` (negative means outside).
    pub s_margin: T,
    /// Smallest cone margin of `z` (negative means outside).
    pub z_margin: T,
}

impl<T: Scalar> ResidualReport<T> {
    pub fn primal_residual(&self) -> T {
        self.eq_residual.max(self.cone_residual)
    }
}

pub fn residuals<T: Scalar>(
    program: &ConicProgram<T>,
    solution: &ConicSolution<T>,
) -> Result<ResidualReport<T>, SolverError> {
    residuals_at(program, &solution.x, &solution.y, &solution.z, &solution.s)
}

pub(crate) fn residuals_at<T: Scalar>(
    p: &ConicProgram<T>,
    x: &[T],
    y: &[T],
    z: &[T],
    s: &[T],
) -> Result<ResidualReport<T>, SolverError> {
    let (n, me, mc) = (p.num_vars(), p.num_equalities(), p.num_cone_rows());
    if x.len() != n || y.len() != me || z.len() != mc || s.len() != mc {
        return Err(SolverError::Dimension(format!(
            "expected x:{n} y:{me} z:{mc} s:{mc}, got x:{} y:{} z:{} s:{}",
            x.len(),
            y.len(),
            z.len(),
            s.len()
        )));
    }
    let one = T::one();

    let mut r_eq = p.b_eq.iter().map(|&b| -b).collect::<Vec<_>>();
    p.a_eq.gemv(one, x, one, &mut r_eq);
    let eq_residual = norm_inf(&r_eq) / (one + norm_inf(&p.b_eq));

    let mut r_cone: Vec<T> = s.iter().zip(&p.h).map(|(&si, &hi)| si - hi).collect();
    p.g.gemv(one, x, one, &mut r_cone);
    let cone_residual = norm_inf(&r_cone) / (one + norm_inf(&p.h));

    let mut r_dual = p.c.clone();
    p.a_eq.gemv_t(one, y, one, &mut r_dual);
    p.g.gemv_t(one, z, one, &mut r_dual);
    let dual_residual = norm_inf(&r_dual) / (one + norm_inf(&p.c));

    let primal_objective = dot(&p.c, x);
    let dual_objective = -(dot(&p.b_eq, y) + dot(&p.h, z));
    let gap = (primal_objective - dual_objective).abs() / (one + primal_objective.abs());

    let mut s_margin = T::infinity();
    let mut z_margin = T::infinity();
    for (cone, r) in p.cone_ranges() {
        s_margin = s_margin.min(cone.margin(&s[r.clone()]));
        // every supported cone is self-dual
        z_margin = z_margin.min(cone.margin(&z[r]));
    }

    Ok(ResidualReport {
        eq_residual,
        cone_residual,
        dual_residual,
        gap,
        primal_objective,
        dual_objective,
        s_margin,
        z_margin,
    })
}

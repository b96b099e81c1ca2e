use super::*;
use crate::program::{AffineExpr, Cone, ConicBuilder};

fn lp_x_at_least_one() -> ConicProgram<f64> {
    let mut b = ConicBuilder::new(1);
    b.set_objective(0, 1.0);
    b.add_nonnegative(&AffineExpr::var(0).plus(-1.0));
    b.build()
}

/// min α  s.t.  α·v ≥ 1, v ≤ 2, v ≥ 0; variables (α, v).
fn hyperbolic_instance() -> ConicProgram<f64> {
    let mut b = ConicBuilder::new(2);
    b.set_objective(0, 1.0);
    b.add_nonnegative(&AffineExpr::constant(2.0).term(1, -1.0));
    b.add_nonnegative(&AffineExpr::var(1));
    crate::program::hyperbolic_cone_rows(
        AffineExpr::var(0),
        AffineExpr::var(1),
        AffineExpr::constant(1.0),
    )
    .unwrap()
    .add_to(&mut b);
    b.build()
}

/// A small mixed instance with equalities, an orthant and both SOC kinds.
fn mixed_instance() -> ConicProgram<f64> {
    // min x0 + 2 x1 + x2  s.t. x0 + x1 + x2 = 3, ‖(x1, x2)‖ ≤ x0, x2·x1 ≥ 0.25, x ≥ 0
    let mut b = ConicBuilder::new(3);
    b.set_objective(0, 1.0);
    b.set_objective(1, 2.0);
    b.set_objective(2, 1.0);
    b.add_equality(&AffineExpr::constant(-3.0).term(0, 1.0).term(1, 1.0).term(2, 1.0));
    for j in 0..3 {
        b.add_nonnegative(&AffineExpr::var(j));
    }
    b.add_cone(
        Cone::SecondOrder(3),
        &[AffineExpr::var(0), AffineExpr::var(1), AffineExpr::var(2)],
    );
    crate::program::hyperbolic_cone_rows(
        AffineExpr::var(2),
        AffineExpr::var(1),
        AffineExpr::constant(0.5),
    )
    .unwrap()
    .add_to(&mut b);
    b.build()
}

fn assert_certified(p: &ConicProgram<f64>, sol: &ConicSolution<f64>, tol: f64) {
    assert_eq!(sol.status, SolveStatus::Optimal);
    let r = residuals(p, sol).unwrap();
    assert!(r.eq_residual <= tol, "{r:?}");
    assert!(r.cone_residual <= tol, "{r:?}");
    assert!(r.dual_residual <= tol, "{r:?}");
    assert!(r.gap <= tol, "{r:?}");
    assert!(r.s_margin >= -tol && r.z_margin >= -tol, "{r:?}");
}

#[test]
fn textbook_lp() {
    let p = lp_x_at_least_one();
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_certified(&p, &sol, 1e-8);
    approx::assert_abs_diff_eq!(sol.x[0], 1.0, epsilon = 1e-7);
}

#[test]
fn hyperbolic_boundary_is_active() {
    let p = hyperbolic_instance();
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_certified(&p, &sol, 1e-8);
    approx::assert_abs_diff_eq!(sol.x[0], 0.5, epsilon = 1e-7);
    approx::assert_abs_diff_eq!(sol.x[1], 2.0, epsilon = 1e-6);
}

#[test]
fn mixed_cones_with_equality() {
    let p = mixed_instance();
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_certified(&p, &sol, 1e-8);
    // x0 ≥ ‖(x1, x2)‖ and x1 x2 ≥ 1/4 bind; the sum is 3
    let x = &sol.x;
    approx::assert_abs_diff_eq!(x[0] + x[1] + x[2], 3.0, epsilon = 1e-7);
    assert!(x[1] * x[2] >= 0.25 - 1e-6);
}

#[test]
fn unequilibrated_solve_agrees() {
    let p = mixed_instance();
    let a = solve(&p, &SolverSettings::default()).unwrap();
    let settings = SolverSettings {
        equilibrate: false,
        ..SolverSettings::default()
    };
    let b = solve(&p, &settings).unwrap();
    assert_certified(&p, &b, 1e-8);
    approx::assert_abs_diff_eq!(a.primal_objective, b.primal_objective, epsilon = 1e-7);
}

#[test]
fn infeasible_lp_returns_certificate() {
    // x ≥ 1 and x ≤ 0
    let mut b = ConicBuilder::new(1);
    b.set_objective(0, 1.0);
    b.add_nonnegative(&AffineExpr::var(0).plus(-1.0));
    b.add_nonnegative(&AffineExpr::constant(0.0).term(0, -1.0));
    let p = b.build();
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::PrimalInfeasible);
    // z ∈ K*, hᵀz = -1, Gᵀz ≈ 0
    let hz: f64 = p.h.iter().zip(&sol.z).map(|(h, z)| h * z).sum();
    approx::assert_abs_diff_eq!(hz, -1.0, epsilon = 1e-12);
    assert!(sol.z.iter().all(|&z| z >= 0.0));
    let mut gz = vec![0.0; 1];
    p.g.gemv_t(1.0, &sol.z, 0.0, &mut gz);
    assert!(gz[0].abs() <= 1e-8);
}

#[test]
fn unbounded_lp_returns_ray() {
    // min -x s.t. x ≥ 1
    let mut b = ConicBuilder::new(1);
    b.set_objective(0, -1.0);
    b.add_nonnegative(&AffineExpr::var(0).plus(-1.0));
    let p = b.build();
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::DualInfeasible);
    approx::assert_abs_diff_eq!(p.c[0] * sol.x[0], -1.0, epsilon = 1e-12);
}

#[test]
fn iteration_and_time_limits_are_reported() {
    let p = mixed_instance();
    let s = SolverSettings {
        max_iterations: 1,
        ..SolverSettings::default()
    };
    assert_eq!(solve(&p, &s).unwrap().status, SolveStatus::IterationLimit);
    let s = SolverSettings {
        time_limit_s: Some(0.0),
        ..SolverSettings::default()
    };
    assert_eq!(solve(&p, &s).unwrap().status, SolveStatus::TimeLimit);
}

#[test]
fn invalid_settings_are_rejected() {
    let p = lp_x_at_least_one();
    let bad = [
        SolverSettings {
            gap_tol: 0.0,
            ..SolverSettings::default()
        },
        SolverSettings {
            static_regularization: -1.0,
            ..SolverSettings::default()
        },
        SolverSettings {
            max_iterations: 0,
            ..SolverSettings::default()
        },
    ];
    for s in bad {
        assert!(matches!(solve(&p, &s), Err(SolverError::Settings(_))));
    }
}

#[test]
fn deterministic_bit_for_bit() {
    let p = mixed_instance();
    let a = solve(&p, &SolverSettings::default()).unwrap();
    let b = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.x, b.x);
    assert_eq!(a.y, b.y);
    assert_eq!(a.z, b.z);
    assert_eq!(a.s, b.s);
}

#[test]
fn objective_scaling_keeps_argmin() {
    let p = mixed_instance();
    let mut q = p.clone();
    q.c.iter_mut().for_each(|c| *c *= 1e3);
    let a = solve(&p, &SolverSettings::default()).unwrap();
    let b = solve(&q, &SolverSettings::default()).unwrap();
    assert_eq!(b.status, SolveStatus::Optimal);
    for (x, y) in a.x.iter().zip(&b.x) {
        assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{x} vs {y}");
    }
}

#[test]
fn single_precision_solve() {
    let p = hyperbolic_instance();
    let q = ConicProgram::<f32> {
        c: p.c.iter().map(|&v| v as f32).collect(),
        a_eq: CscMatrix::zeros(0, 2),
        b_eq: Vec::new(),
        g: CscMatrix {
            nrows: p.g.nrows,
            ncols: p.g.ncols,
            colptr: p.g.colptr.clone(),
            rowval: p.g.rowval.clone(),
            nzval: p.g.nzval.iter().map(|&v| v as f32).collect(),
        },
        h: p.h.iter().map(|&v| v as f32).collect(),
        cones: p.cones.clone(),
    };
    let sol = solve(&q, &SolverSettings::<f32>::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.x[0] - 0.5).abs() < 1e-3);
}

#[test]
fn residuals_of_exact_point_vanish_and_detect_perturbation() {
    // min x0 + x1  s.t. x0 + x1 = 2, x ≥ 0: optimum anywhere on the segment
    let mut b = ConicBuilder::new(2);
    b.set_objective(0, 1.0);
    b.set_objective(1, 1.0);
    b.add_equality(&AffineExpr::constant(-2.0).term(0, 1.0).term(1, 1.0));
    b.add_nonnegative(&AffineExpr::var(0));
    b.add_nonnegative(&AffineExpr::var(1));
    let p = b.build();
    let mut sol = ConicSolution {
        status: SolveStatus::Optimal,
        x: vec![1.0, 1.0],
        y: vec![-1.0],
        z: vec![0.0, 0.0],
        s: vec![1.0, 1.0],
        primal_objective: 2.0,
        gap: 0.0,
        eq_residual: 0.0,
        cone_residual: 0.0,
        dual_residual: 0.0,
        iterations: 0,
        solve_time_s: 0.0,
    };
    let r = residuals(&p, &sol).unwrap();
    for v in [r.eq_residual, r.cone_residual, r.dual_residual, r.gap] {
        assert!(v <= 1e-12);
    }
    sol.x[0] += 1e-3;
    let r = residuals(&p, &sol).unwrap();
    assert!(r.eq_residual >= 1e-4);

    sol.z.push(0.0);
    assert!(matches!(residuals(&p, &sol), Err(SolverError::Dimension(_))));
}

#[test]
fn reported_gap_matches_recomputation() {
    let p = mixed_instance();
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    let r = residuals(&p, &sol).unwrap();
    assert!((r.gap - sol.gap).abs() <= 1e-12);
    assert!((r.eq_residual - sol.eq_residual).abs() <= 1e-12);
}

#[test]
fn malformed_program_is_an_error() {
    let mut p = lp_x_at_least_one();
    p.h.push(0.0);
    assert!(matches!(
        solve(&p, &SolverSettings::default()),
        Err(SolverError::Program(_))
    ));
}

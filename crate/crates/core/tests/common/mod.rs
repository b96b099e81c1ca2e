//! Shared helpers for the integration tests: an exhaustive-search oracle for
//! tiny instances and checks of points against an emitted program.

#![allow(dead_code, clippy::needless_range_loop)]

use eetc::ingest::{DiscretizedRoute, RollingStock, GRAVITY};
use eetc::program::{Cone, ConicProgram, TimeMode, VariableMap};

/// Physical decision vector in `[v | α | β | F | E]` order, built from a
/// speed profile with every relaxed constraint holding as an equality.
pub fn tight_point(
    speeds: &[f64],
    stock: &RollingStock<f64>,
    route: &DiscretizedRoute<f64>,
    mode: TimeMode,
) -> Vec<f64> {
    let n = route.n_segments;
    assert_eq!(speeds.len(), n + 1);
    let dd = route.segment_length_m;
    let mut x = vec![0.0; 5 * n];
    for i in 1..=n {
        let (v0, v1) = (speeds[i - 1], speeds[i]);
        let f = effort(v0, v1, route.altitude_change_m[i - 1], dd, stock);
        x[i - 1] = v1;
        x[n + i - 1] = match mode {
            TimeMode::Endpoint => 1.0 / v1,
            TimeMode::Trapezoidal => 2.0 / (v0 + v1),
        };
        x[2 * n + i - 1] = v1 * v1;
        x[3 * n + i - 1] = f;
        x[4 * n + i - 1] = electrical(f * dd, stock);
    }
    x
}

/// Effort closing the energy balance of one segment, with resistance taken at
/// the segment's terminal speed.
pub fn effort(v0: f64, v1: f64, dh: f64, dd: f64, stock: &RollingStock<f64>) -> f64 {
    let m = stock.mass_kg;
    let resistance = stock.davis_a_n + stock.davis_b_n_per_mps * v1 + stock.davis_c_n_per_mps2 * v1 * v1;
    0.5 * m * (v1 * v1 - v0 * v0) / dd + resistance + m * GRAVITY * dh / dd
}

/// Net electrical energy for mechanical work `w`.
pub fn electrical(w: f64, stock: &RollingStock<f64>) -> f64 {
    (w / stock.traction_efficiency).max(w * stock.braking_efficiency)
}

/// Whether a speed profile satisfies the original (nonconvex) constraints:
/// speed limits, effort and power bounds. Time is not checked.
pub fn profile_is_admissible(
    speeds: &[f64],
    stock: &RollingStock<f64>,
    route: &DiscretizedRoute<f64>,
    mode: TimeMode,
) -> bool {
    let dd = route.segment_length_m;
    (1..=route.n_segments).all(|i| {
        let (v0, v1) = (speeds[i - 1], speeds[i]);
        let f = effort(v0, v1, route.altitude_change_m[i - 1], dd, stock);
        // a pinned terminal speed may be zero in trapezoidal mode
        let pace = match mode {
            TimeMode::Endpoint => v1,
            TimeMode::Trapezoidal => (v0 + v1) / 2.0,
        };
        let alpha = 1.0 / pace;
        pace > 0.0
            && v1 >= 0.0
            && v1 <= route.point_speed_limit_mps[i]
            && f <= stock.max_tractive_effort_n
            && f >= -stock.max_braking_effort_n
            && f <= stock.max_traction_power_w * alpha
            && -f <= stock.max_braking_power_w * alpha
    })
}

pub fn running_time(speeds: &[f64], dd: f64, mode: TimeMode) -> f64 {
    (1..speeds.len())
        .map(|i| match mode {
            TimeMode::Endpoint => dd / speeds[i],
            TimeMode::Trapezoidal => 2.0 * dd / (speeds[i - 1] + speeds[i]),
        })
        .sum()
}

/// Positive `x` with `2Δd/(a + x) + 2Δd/(x + b) = r`.
fn closing_speed(a: f64, b: f64, dd: f64, r: f64) -> Option<f64> {
    // r x² + (r(a+b) − 4Δd) x + r a b − 2Δd(a+b) = 0
    let qa = r;
    let qb = r * (a + b) - 4.0 * dd;
    let qc = r * a * b - 2.0 * dd * (a + b);
    let disc = qb * qb - 4.0 * qa * qc;
    if !(r > 0.0 && disc >= 0.0) {
        return None;
    }
    let x = (-qb + disc.sqrt()) / (2.0 * qa);
    (x > 0.0).then_some(x)
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub energy_kwh: f64,
    pub speeds: Vec<f64>,
    pub evaluated: usize,
}

/// Exhaustive search over the interior speeds of a trapezoidal instance
/// with two or three segments.
///
/// With `N = 3` the first interior speed runs over a `step` grid and the
/// second closes the time equation exactly; with `N = 2` the time equation
/// alone fixes the only interior speed. Each candidate is evaluated directly
/// from the nonconvex model.
pub fn grid_oracle(
    stock: &RollingStock<f64>,
    route: &DiscretizedRoute<f64>,
    time_s: f64,
    step: f64,
) -> Option<OracleResult> {
    let n = route.n_segments;
    assert!(n == 2 || n == 3, "oracle handles two or three segments");
    let dd = route.segment_length_m;
    let (v0, vn) = (route.start_speed_mps, route.end_speed_mps);
    let mode = TimeMode::Trapezoidal;
    let evaluate = |speeds: &[f64]| -> Option<f64> {
        if !profile_is_admissible(speeds, stock, route, mode) {
            return None;
        }
        if (running_time(speeds, dd, mode) - time_s).abs() > 1e-9 * time_s {
            return None;
        }
        let e: f64 = (1..=n)
            .map(|i| {
                let f = effort(speeds[i - 1], speeds[i], route.altitude_change_m[i - 1], dd, stock);
                electrical(f * dd, stock)
            })
            .sum();
        Some(e / 3.6e6)
    };

    let mut best: Option<OracleResult> = None;
    let mut evaluated = 0;
    let mut consider = |speeds: Vec<f64>| {
        evaluated += 1;
        if let Some(e) = evaluate(&speeds) {
            if best.as_ref().is_none_or(|b| e < b.energy_kwh) {
                best = Some(OracleResult {
                    energy_kwh: e,
                    speeds,
                    evaluated: 0,
                });
            }
        }
    };
    if n == 2 {
        if let Some(v1) = closing_speed(v0, vn, dd, time_s) {
            consider(vec![v0, v1, vn]);
        }
    } else {
        let limit = route.point_speed_limit_mps[1];
        let steps = (limit / step).floor() as usize;
        for k in 1..=steps {
            let v1 = k as f64 * step;
            let rest = time_s - 2.0 * dd / (v0 + v1);
            if let Some(v2) = closing_speed(v1, vn, dd, rest) {
                consider(vec![v0, v1, v2, vn]);
            }
        }
    }
    best.map(|b| OracleResult { evaluated, ..b })
}

/// Largest violation of `x` against the program: each equality residual
/// relative to the magnitude of its terms, and the smallest cone margin
/// relative to the magnitude of the terms of its rows.
pub struct Containment {
    pub eq_rel: f64,
    pub cone_margin: f64,
}

pub fn containment(program: &ConicProgram<f64>, map: &VariableMap, physical: &[f64]) -> Containment {
    let x = map.to_program(physical);
    let mut ax = vec![0.0; program.num_equalities()];
    let mut scale = program.b_eq.iter().map(|b| b.abs()).collect::<Vec<_>>();
    program.a_eq.gemv(1.0, &x, 0.0, &mut ax);
    for j in 0..x.len() {
        for (i, a) in program.a_eq.col(j) {
            scale[i] += (a * x[j]).abs();
        }
    }
    let eq_rel = ax
        .iter()
        .zip(&program.b_eq)
        .zip(&scale)
        .map(|((a, b), s)| (a - b).abs() / s.max(1e-300))
        .fold(0.0, f64::max);
    let s = program.slack_at(&x);
    let mut row_scale: Vec<f64> = program.h.iter().map(|h| h.abs()).collect();
    for j in 0..x.len() {
        for (i, g) in program.g.col(j) {
            row_scale[i] += (g * x[j]).abs();
        }
    }
    let cone_margin = program
        .cone_ranges()
        .map(|(cone, r)| match cone {
            Cone::Nonnegative(_) => r
                .map(|i| s[i] / row_scale[i].max(1e-300))
                .fold(f64::INFINITY, f64::min),
            _ => {
                let size = r.clone().map(|i| row_scale[i]).fold(1e-300, f64::max);
                cone.margin(&s[r]) / size
            }
        })
        .fold(f64::INFINITY, f64::min);
    Containment { eq_rel, cone_margin }
}

use std::ops::Range;

use super::conic::{AffineExpr, ConicBuilder, ConicProgram};
use super::hyperbolic::hyperbolic_cone_rows;
use super::ProgramError;
use crate::ingest::{DiscretizedRoute, RollingStock, GRAVITY};
use crate::scalar::{lit, to_f64, Scalar};

/// Lower bound standing in for the strict inequality `v_i > 0`.
pub const SPEED_FLOOR_MPS: f64 = 1e-6;

/// How segment running time is tied to the speed variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TimeMode {
    /// `Δd·α_i` with `α_i·v_i ≥ 1`: the segment runs at its terminal speed.
    #[default]
    Endpoint,
    /// `Δd·α_i` with `α_i·(v_{i−1} + v_i) ≥ 2`: the segment runs at the
    /// mean of its boundary speeds.
    Trapezoidal,
}

impl TimeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TimeMode::Endpoint => "endpoint",
            TimeMode::Trapezoidal => "trapezoidal",
        }
    }
}

impl std::fmt::Display for TimeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TimeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "endpoint" => Ok(TimeMode::Endpoint),
            "trapezoidal" => Ok(TimeMode::Trapezoidal),
            other => Err(format!("unknown time mode `{other}`")),
        }
    }
}

/// Column layout of the decision vector: `[v | α | β | F | E]`, each block
/// indexed by segment `i = 1..N`.
///
/// Columns are expressed in per-block reference units so that a typical
/// value is of order one: program column `j` holds `physical / units[block]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableMap {
    pub n_segments: usize,
    pub mode: TimeMode,
    pub speed: Range<usize>,
    pub alpha: Range<usize>,
    pub beta: Range<usize>,
    pub force: Range<usize>,
    pub energy: Range<usize>,
    /// Reference unit of the v, α, β, F and E blocks, in SI.
    pub units: [f64; 5],
}

impl VariableMap {
    /// Layout with unit reference scales.
    pub fn new(n: usize, mode: TimeMode) -> Self {
        Self {
            n_segments: n,
            mode,
            speed: 0..n,
            alpha: n..2 * n,
            beta: 2 * n..3 * n,
            force: 3 * n..4 * n,
            energy: 4 * n..5 * n,
            units: [1.0; 5],
        }
    }

    pub fn total(&self) -> usize {
        5 * self.n_segments
    }

    /// SI value of one program unit in column `j`.
    pub fn unit_of(&self, j: usize) -> f64 {
        self.units[j / self.n_segments]
    }

    /// Program vector to SI values.
    pub fn to_physical<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .enumerate()
            .map(|(j, &v)| v * lit(self.unit_of(j)))
            .collect()
    }

    /// SI values to the program vector.
    pub fn to_program<T: Scalar>(&self, physical: &[T]) -> Vec<T> {
        physical
            .iter()
            .enumerate()
            .map(|(j, &v)| v / lit(self.unit_of(j)))
            .collect()
    }

    /// Column of `v_i`, `i` in `1..=N`.
    pub fn v(&self, i: usize) -> usize {
        self.speed.start + i - 1
    }

    pub fn alpha(&self, i: usize) -> usize {
        self.alpha.start + i - 1
    }

    pub fn beta(&self, i: usize) -> usize {
        self.beta.start + i - 1
    }

    pub fn force(&self, i: usize) -> usize {
        self.force.start + i - 1
    }

    pub fn energy(&self, i: usize) -> usize {
        self.energy.start + i - 1
    }
}

/// Running time with every point at its speed limit (boundary speeds
/// fixed where the mode fixes them). Any `T` at or below this is infeasible.
pub fn minimum_time_bound<T: Scalar>(route: &DiscretizedRoute<T>, mode: TimeMode) -> f64 {
    let dd = to_f64(route.segment_length_m);
    let lim: Vec<f64> = route.point_speed_limit_mps.iter().map(|&v| to_f64(v)).collect();
    let n = route.n_segments;
    match mode {
        TimeMode::Endpoint => (1..=n).map(|i| dd / lim[i]).sum(),
        TimeMode::Trapezoidal => {
            let mut top = lim.clone();
            top[0] = to_f64(route.start_speed_mps);
            top[n] = to_f64(route.end_speed_mps);
            (1..=n).map(|i| 2.0 * dd / (top[i - 1] + top[i])).sum()
        }
    }
}

/// Emits the relaxed model: minimize `Σ E_i` subject to the time equality,
/// the energy balance of every segment, the effort, power and speed bounds,
/// and the hyperbolic cones `α_i·w_i ≥ c²` and `β_i ≥ v_i²`.
pub fn build_program<T: Scalar>(
    stock: &RollingStock<T>,
    route: &DiscretizedRoute<T>,
    journey_time_s: T,
    mode: TimeMode,
) -> Result<(ConicProgram<T>, VariableMap), ProgramError> {
    let n = route.n_segments;
    if route.altitude_change_m.len() != n || route.point_speed_limit_mps.len() != n + 1 || n < 1 {
        return Err(ProgramError::Dimension(format!(
            "route with {n} segments has {} altitude changes and {} point limits",
            route.altitude_change_m.len(),
            route.point_speed_limit_mps.len()
        )));
    }
    let time = to_f64(journey_time_s);
    if !(time > 0.0 && time.is_finite()) {
        return Err(ProgramError::InvalidTime(time));
    }
    let v_end = route.end_speed_mps;
    if mode == TimeMode::Endpoint && !(v_end > T::zero()) {
        return Err(ProgramError::EndpointZeroTerminal);
    }
    let min_time = minimum_time_bound(route, mode);
    if time <= min_time {
        return Err(ProgramError::InfeasibleTime {
            time_s: time,
            min_time_s: min_time,
        });
    }

    let map = VariableMap::new(n, mode);
    let mut b = ConicBuilder::new(map.total());
    let dd = route.segment_length_m;
    let m = stock.mass_kg;
    let half_m = lit::<T>(0.5) * m;
    let g = lit::<T>(GRAVITY);
    let v0 = route.start_speed_mps;
    let floor = lit::<T>(SPEED_FLOOR_MPS);
    let one = T::one();
    let var = AffineExpr::<T>::var;

    for i in 1..=n {
        b.set_objective(map.energy(i), one);
    }

    let mut time_row = AffineExpr::constant(-journey_time_s);
    for i in 1..=n {
        time_row = time_row.term(map.alpha(i), dd);
    }
    b.add_equality(&time_row);

    for i in 1..=n {
        // Δd·F_i − ½M(β_i − β_{i−1}) − (A + B v_i + C β_i)Δd − M g ΔH_i = 0
        let mut row = AffineExpr::constant(-stock.davis_a_n * dd - m * g * route.altitude_change_m[i - 1])
            .term(map.force(i), dd)
            .term(map.beta(i), -(half_m + stock.davis_c_n_per_mps2 * dd))
            .term(map.v(i), -stock.davis_b_n_per_mps * dd);
        if i == 1 {
            row = row.plus(half_m * v0 * v0);
        } else {
            row = row.term(map.beta(i - 1), half_m);
        }
        b.add_equality(&row);
    }
    if mode == TimeMode::Trapezoidal {
        // the terminal point is a boundary condition like the start: pin v_N
        // and β_N = v_N² so the relaxation cannot hide kinetic energy there
        b.add_equality(&var(map.v(n)).plus(-v_end));
        b.add_equality(&var(map.beta(n)).plus(-v_end * v_end));
    }

    let (eta_t, eta_b) = (stock.traction_efficiency, stock.braking_efficiency);
    for i in 1..=n {
        let (v, a, bt, f, e) = (map.v(i), map.alpha(i), map.beta(i), map.force(i), map.energy(i));
        let limit = route.point_speed_limit_mps[i];
        b.add_nonnegative(&var(e).term(f, -dd / eta_t));
        b.add_nonnegative(&var(e).term(f, -dd * eta_b));
        b.add_nonnegative(&AffineExpr::constant(stock.max_tractive_effort_n).term(f, -one));
        b.add_nonnegative(&var(f).plus(stock.max_braking_effort_n));
        b.add_nonnegative(&var(a).scale(stock.max_traction_power_w).term(f, -one));
        b.add_nonnegative(&var(f).term(a, stock.max_braking_power_w));
        b.add_nonnegative(&AffineExpr::constant(limit * limit).term(bt, -one));
        b.add_nonnegative(&AffineExpr::constant(limit).term(v, -one));
        let lower = if i == n && mode == TimeMode::Endpoint {
            v_end.max(floor)
        } else {
            floor
        };
        if !(i == n && mode == TimeMode::Trapezoidal) {
            b.add_nonnegative(&var(v).plus(-lower));
        }
    }

    for i in 1..=n {
        let (v, a, bt) = (map.v(i), map.alpha(i), map.beta(i));
        let time_cone = match mode {
            TimeMode::Endpoint => {
                hyperbolic_cone_rows(var(a), var(v), AffineExpr::constant(one))?
            }
            TimeMode::Trapezoidal => {
                let prev = if i == 1 {
                    AffineExpr::constant(v0)
                } else {
                    var(map.v(i - 1))
                };
                let w = prev.add_expr(&var(v));
                hyperbolic_cone_rows(var(a), w, AffineExpr::constant(lit(std::f64::consts::SQRT_2)))?
            }
        };
        time_cone.add_to(&mut b);
        hyperbolic_cone_rows(var(bt), AffineExpr::constant(one), var(v))?.add_to(&mut b);
    }

    let mut map = map;
    let v_ref = route
        .point_speed_limit_mps
        .iter()
        .fold(0.0f64, |m, &v| m.max(to_f64(v)));
    let f_ref = to_f64(stock.max_tractive_effort_n.max(stock.max_braking_effort_n));
    map.units = [v_ref, 1.0 / v_ref, v_ref * v_ref, f_ref, f_ref * to_f64(dd)];
    let mut p = b.build();
    let col: Vec<T> = (0..map.total()).map(|j| lit(map.unit_of(j))).collect();
    p.a_eq.scale(&vec![one; p.num_equalities()], &col);
    p.g.scale(&vec![one; p.num_cone_rows()], &col);
    p.c.iter_mut().zip(&col).for_each(|(c, &u)| *c *= u);
    Ok((p, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{metro_stock, synthetic_route};
    use crate::ingest::Boundaries;
    use crate::program::Cone;

    fn route(n: usize, b: Boundaries) -> DiscretizedRoute<f64> {
        crate::ingest::discretize(&synthetic_route(), n, b).unwrap()
    }

    #[test]
    fn synthetic_dimensions_give_expected_counts() {
        let r = route(238, Boundaries::new(0.0, 0.5));
        let (p, map) = build_program(&metro_stock(), &r, 140.0, TimeMode::Endpoint).unwrap();
        assert_eq!(map.total(), 1190);
        assert_eq!(p.num_vars(), 1190);
        assert_eq!(p.num_equalities(), 239);
        let rotated = p
            .cones
            .iter()
            .filter(|c| matches!(c, Cone::RotatedSecondOrder(3)))
            .count();
        assert_eq!(rotated, 2 * 238);
    }

    #[test]
    fn trapezoidal_pins_terminal_point_with_two_extra_rows() {
        let r = route(10, Boundaries::new(0.0, 3.0));
        let (p, map) = build_program(&metro_stock(), &r, 200.0, TimeMode::Trapezoidal).unwrap();
        assert_eq!(p.num_equalities(), 13);
        let touching = |row: usize| -> Vec<usize> {
            (0..p.num_vars())
                .filter(|&j| p.a_eq.col(j).any(|(i, _)| i == row))
                .collect()
        };
        assert_eq!(touching(11), vec![map.v(10)]);
        assert_eq!(touching(12), vec![map.beta(10)]);
        // columns are in reference units
        let a11 = p.a_eq.col(map.v(10)).find(|&(i, _)| i == 11).unwrap().1;
        approx::assert_relative_eq!(p.b_eq[11] / a11, 3.0 / map.units[0], max_relative = 1e-14);
        let a12 = p.a_eq.col(map.beta(10)).find(|&(i, _)| i == 12).unwrap().1;
        approx::assert_relative_eq!(p.b_eq[12] / a12, 9.0 / map.units[2], max_relative = 1e-14);
    }

    #[test]
    fn standing_start_moves_nothing_into_first_energy_row() {
        let r = route(5, Boundaries::new(0.0, 0.5));
        let stock = metro_stock();
        let (p, map) = build_program(&stock, &r, 140.0, TimeMode::Endpoint).unwrap();
        // flat route: rhs is just the Davis constant term
        let a_dd = stock.davis_a_n * r.segment_length_m;
        for row in 1..=5 {
            approx::assert_relative_eq!(p.b_eq[row], a_dd, max_relative = 1e-14);
        }
        // row 1 touches β_1 only among the β columns
        let betas: Vec<usize> = map
            .beta
            .clone()
            .filter(|&j| p.a_eq.col(j).any(|(i, _)| i == 1))
            .collect();
        assert_eq!(betas, vec![map.beta(1)]);

        let r = route(5, Boundaries::new(10.0, 0.5));
        let (p, _) = build_program(&stock, &r, 140.0, TimeMode::Endpoint).unwrap();
        approx::assert_relative_eq!(p.b_eq[1], a_dd - 0.5 * stock.mass_kg * 100.0, max_relative = 1e-14);
    }

    #[test]
    fn gradient_enters_energy_rows() {
        let stock = metro_stock();
        let hilly = crate::fixtures::hilly_route();
        let r = crate::ingest::discretize(&hilly, 20, Boundaries::new(0.0, 0.5)).unwrap();
        let (p, _) = build_program(&stock, &r, 200.0, TimeMode::Endpoint).unwrap();
        for i in 1..=20 {
            let expect = stock.davis_a_n * r.segment_length_m
                + stock.mass_kg * GRAVITY * r.altitude_change_m[i - 1];
            approx::assert_relative_eq!(p.b_eq[i], expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_zero_terminal_speed_in_endpoint_mode() {
        let r = route(10, Boundaries::new(0.0, 0.0));
        let e = build_program(&metro_stock(), &r, 140.0, TimeMode::Endpoint).unwrap_err();
        assert_eq!(e, ProgramError::EndpointZeroTerminal);
    }

    #[test]
    fn rejects_time_below_limit_bound() {
        let r = route(10, Boundaries::new(0.0, 0.5));
        let d_over_v = 2707.0 / (80.0 / 3.6);
        let e = build_program(&metro_stock(), &r, d_over_v, TimeMode::Endpoint).unwrap_err();
        assert!(matches!(e, ProgramError::InfeasibleTime { .. }));
        let e = build_program(&metro_stock(), &r, -1.0, TimeMode::Endpoint).unwrap_err();
        assert!(matches!(e, ProgramError::InvalidTime(_)));
        // the trapezoidal bound includes the standing start and stop
        let r = route(10, Boundaries::new(0.0, 0.0));
        let bound = minimum_time_bound(&r, TimeMode::Trapezoidal);
        assert!(bound > d_over_v);
        assert!(build_program(&metro_stock(), &r, bound, TimeMode::Trapezoidal).is_err());
    }

    #[test]
    fn mode_parses_and_prints() {
        for m in [TimeMode::Endpoint, TimeMode::Trapezoidal] {
            assert_eq!(m.as_str().parse::<TimeMode>().unwrap(), m);
        }
        assert!("radau".parse::<TimeMode>().is_err());
    }
}

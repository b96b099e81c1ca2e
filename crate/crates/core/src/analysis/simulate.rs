use super::AnalysisError;
use crate::ingest::{DiscretizedRoute, RollingStock, RouteProfile, GRAVITY};
use crate::scalar::{lit, to_f64, Scalar};

/// Mechanical energy terms of one simulation step, J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentEnergy<T> {
    /// `e1`: work against running resistance at the mean speed.
    pub drag_j: T,
    /// `e2`: change of kinetic energy.
    pub kinetic_j: T,
    /// `e3`: change of potential energy.
    pub potential_j: T,
    /// `e4 = e1 + e2 + e3`.
    pub mechanical_j: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult<T> {
    /// Net electrical energy `e`, J.
    pub energy_j: T,
    pub energy_kwh: T,
    /// Running time `t`, s.
    pub running_time_s: T,
    pub segments: Vec<SegmentEnergy<T>>,
}

/// Recomputes `(e, t)` from `(d_i, v_i)` pairs, taking the altitude change of
/// step `i` from `route` (which must have one segment per step).
pub fn simulate<T: Scalar>(
    points: &[(T, T)],
    stock: &RollingStock<T>,
    route: &DiscretizedRoute<T>,
) -> Result<SimulationResult<T>, AnalysisError> {
    if points.len() != route.n_segments + 1 {
        return Err(AnalysisError::LengthMismatch {
            points: points.len(),
            segments: route.n_segments,
        });
    }
    run(points, stock, |i| route.altitude_change_m[i - 1])
}

/// As [`simulate`], with the altitude change of each step integrated from the
/// route profile between the step's endpoints. Accepts any point spacing.
pub fn simulate_on_profile<T: Scalar>(
    points: &[(T, T)],
    stock: &RollingStock<T>,
    route: &RouteProfile,
) -> Result<SimulationResult<T>, AnalysisError> {
    run(points, stock, |i| {
        lit(route.altitude_change(to_f64(points[i - 1].0), to_f64(points[i].0)))
    })
}

fn run<T: Scalar>(
    points: &[(T, T)],
    stock: &RollingStock<T>,
    altitude_change: impl Fn(usize) -> T,
) -> Result<SimulationResult<T>, AnalysisError> {
    if points.len() < 2 {
        return Err(AnalysisError::TooFewPoints(points.len()));
    }
    for (i, &(_, v)) in points.iter().enumerate() {
        if !(v >= T::zero() && v.is_finite()) {
            return Err(AnalysisError::InvalidSpeed(i));
        }
    }
    let half = lit::<T>(0.5);
    let g = lit::<T>(GRAVITY);
    let (a, b, c) = (stock.davis_a_n, stock.davis_b_n_per_mps, stock.davis_c_n_per_mps2);
    let m = stock.mass_kg;

    let mut e = T::zero();
    let mut t = T::zero();
    let mut segments = Vec::with_capacity(points.len() - 1);
    for i in 1..points.len() {
        let (d0, v0) = points[i - 1];
        let (d1, v1) = points[i];
        if !(d1 > d0) {
            return Err(AnalysisError::NonIncreasingDistance(i));
        }
        let v_ave = (v1 + v0) / lit(2.0);
        if !(v_ave > T::zero()) {
            return Err(AnalysisError::ZeroAverageSpeed(i));
        }
        let dd = d1 - d0;
        t += dd / v_ave;
        let e1 = (a + b * v_ave + c * v_ave * v_ave) * dd;
        let e2 = half * m * (v1 * v1 - v0 * v0);
        let e3 = m * g * altitude_change(i);
        let e4 = e1 + e2 + e3;
        if e4 >= T::zero() {
            e += e4 / stock.traction_efficiency;
        } else {
            e += e4 * stock.braking_efficiency;
        }
        segments.push(SegmentEnergy {
            drag_j: e1,
            kinetic_j: e2,
            potential_j: e3,
            mechanical_j: e4,
        });
    }
    Ok(SimulationResult {
        energy_j: e,
        energy_kwh: e / lit(3.6e6),
        running_time_s: t,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{hilly_route, metro_stock};
    use crate::ingest::{discretize, Boundaries};
    use proptest::prelude::*;

    fn flat(n: usize, d: f64) -> DiscretizedRoute<f64> {
        discretize(
            &RouteProfile::flat(d, 80.0).unwrap(),
            n,
            Boundaries::new(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn constant_speed_hand_value() {
        let route = flat(2, 200.0);
        let pts = [(0.0, 10.0), (100.0, 10.0), (200.0, 10.0)];
        let r = simulate(&pts, &metro_stock(), &route).unwrap();
        approx::assert_relative_eq!(r.running_time_s, 20.0, max_relative = 1e-14);
        // 3001.6 + 72.576·10 + 9.0320832·100 = 4630.56832 N over 200 m at η_t = 0.9
        approx::assert_relative_eq!(r.energy_j, 4630.56832 * 200.0 / 0.9, max_relative = 1e-12);
        approx::assert_abs_diff_eq!(r.energy_kwh, 0.2858, epsilon = 5e-5);
        for s in &r.segments {
            assert_eq!(s.kinetic_j, 0.0);
            assert_eq!(s.potential_j, 0.0);
        }
    }

    #[test]
    fn braking_step_uses_regeneration_branch() {
        let route = flat(2, 200.0);
        let stock = metro_stock();
        let pts = [(0.0, 20.0), (100.0, 20.0), (200.0, 10.0)];
        let r = simulate(&pts, &stock, &route).unwrap();
        let (cruise, s) = (r.segments[0], r.segments[1]);
        assert!(cruise.mechanical_j > 0.0);
        assert!(s.mechanical_j < 0.0);
        approx::assert_relative_eq!(
            r.energy_j,
            cruise.mechanical_j / stock.traction_efficiency + s.mechanical_j * stock.braking_efficiency,
            max_relative = 1e-15
        );
        approx::assert_relative_eq!(s.mechanical_j, s.drag_j + s.kinetic_j + s.potential_j, max_relative = 1e-15);
    }

    #[test]
    fn flat_equal_end_speeds_telescope() {
        let route = flat(4, 400.0);
        let pts = [(0.0, 5.0), (100.0, 12.0), (200.0, 15.0), (300.0, 9.0), (400.0, 5.0)];
        let r = simulate(&pts, &metro_stock(), &route).unwrap();
        let e2: f64 = r.segments.iter().map(|s| s.kinetic_j).sum();
        let e3: f64 = r.segments.iter().map(|s| s.potential_j).sum();
        assert!(e2.abs() < 1e-6);
        assert_eq!(e3, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let route = flat(2, 200.0);
        let s = metro_stock();
        assert_eq!(
            simulate(&[(0.0, 1.0), (100.0, 1.0)], &s, &route),
            Err(AnalysisError::LengthMismatch { points: 2, segments: 2 })
        );
        assert_eq!(
            simulate(&[(0.0, 0.0), (100.0, 0.0), (200.0, 3.0)], &s, &route),
            Err(AnalysisError::ZeroAverageSpeed(1))
        );
        assert_eq!(
            simulate(&[(0.0, 1.0), (100.0, 1.0), (100.0, 1.0)], &s, &route),
            Err(AnalysisError::NonIncreasingDistance(2))
        );
        assert_eq!(
            simulate(&[(0.0, 1.0), (100.0, -1.0), (200.0, 1.0)], &s, &route),
            Err(AnalysisError::InvalidSpeed(1))
        );
        assert_eq!(
            simulate_on_profile(&[(0.0, 1.0)], &s, &RouteProfile::flat(200.0, 80.0).unwrap()),
            Err(AnalysisError::TooFewPoints(1))
        );
    }

    #[test]
    fn profile_and_discretized_paths_agree() {
        let profile = hilly_route();
        let n = 50;
        let route = discretize(&profile, n, Boundaries::new(0.0, 0.0)).unwrap();
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let d: f64 = route.distance_at(i);
                (d, 2.0 + 15.0 * (std::f64::consts::PI * d / 2707.0).sin())
            })
            .collect();
        let a = simulate(&pts, &metro_stock(), &route).unwrap();
        let b = simulate_on_profile(&pts, &metro_stock(), &profile).unwrap();
        approx::assert_relative_eq!(a.energy_j, b.energy_j, max_relative = 1e-10);
        assert_eq!(a.running_time_s, b.running_time_s);
    }

    fn smooth_profile(n: usize, peak: f64, phase: f64) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64;
                (2707.0 * x, 5.0 + peak * (std::f64::consts::PI * x).sin() + phase * x)
            })
            .collect()
    }

    fn densify(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out = vec![pts[0]];
        for w in pts.windows(2) {
            out.push(((w[0].0 + w[1].0) / 2.0, (w[0].1 + w[1].1) / 2.0));
            out.push(w[1]);
        }
        out
    }

    proptest! {
        #[test]
        fn densification_is_stable(n in 50usize..300, peak in 5.0f64..20.0, phase in 0.0f64..3.0) {
            let route = RouteProfile::flat(2707.0, 80.0).unwrap();
            let coarse = smooth_profile(n, peak, phase);
            let fine = densify(&coarse);
            let a = simulate_on_profile(&coarse, &metro_stock(), &route).unwrap();
            let b = simulate_on_profile(&fine, &metro_stock(), &route).unwrap();
            prop_assert!((a.running_time_s - b.running_time_s).abs() <= 5e-3 * a.running_time_s);
            prop_assert!((a.energy_j - b.energy_j).abs() <= 5e-3 * a.energy_j.abs());
        }

        #[test]
        fn regeneration_efficiency_irrelevant_without_braking(
            speeds in proptest::collection::vec(5.0f64..20.0, 3..30),
            eta_b in 0.05f64..1.0,
        ) {
            // monotone non-decreasing speed on a flat route: every e4 > 0
            let mut sorted = speeds.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = sorted.len() - 1;
            let route = flat(n, 100.0 * n as f64);
            let pts: Vec<(f64, f64)> = sorted.iter().enumerate().map(|(i, &v)| (100.0 * i as f64, v)).collect();
            let s = metro_stock();
            let mut s2 = s;
            s2.braking_efficiency = eta_b;
            let a = simulate(&pts, &s, &route).unwrap();
            let b = simulate(&pts, &s2, &route).unwrap();
            prop_assert!(a.segments.iter().all(|x| x.mechanical_j >= 0.0));
            prop_assert_eq!(a.energy_j, b.energy_j);
        }

        #[test]
        fn mechanical_energy_is_sum_of_terms(
            speeds in proptest::collection::vec(0.5f64..25.0, 51),
        ) {
            let route = discretize(&hilly_route(), 50, Boundaries::new(0.0, 0.0)).unwrap();
            let pts: Vec<(f64, f64)> = speeds.iter().enumerate().map(|(i, &v)| (route.distance_at(i), v)).collect();
            let r = simulate(&pts, &metro_stock(), &route).unwrap();
            prop_assert!(r.running_time_s > 0.0);
            for s in &r.segments {
                prop_assert_eq!(s.mechanical_j, s.drag_j + s.kinetic_j + s.potential_j);
            }
        }
    }
}

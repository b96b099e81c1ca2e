use super::{IngestError, RouteProfile};
use crate::scalar::{lit, to_f64, Scalar};

/// Station boundary speeds in m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundaries {
    pub start_mps: f64,
    pub end_mps: f64,
}

impl Boundaries {
    pub fn new(start_mps: f64, end_mps: f64) -> Self {
        Self { start_mps, end_mps }
    }
}

/// Route sliced into `N` equal segments.
///
/// Segment `i` (1-based) runs from point `i - 1` to point `i`; per-segment
/// arrays are stored 0-based, so `altitude_change_m[i - 1]` belongs to
/// segment `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedRoute<T> {
    pub n_segments: usize,
    pub total_distance_m: T,
    pub segment_length_m: T,
    /// ΔH per segment, length N.
    pub altitude_change_m: Vec<T>,
    /// Speed limit at each point, length N + 1.
    pub point_speed_limit_mps: Vec<T>,
    pub start_speed_mps: T,
    pub end_speed_mps: T,
}

impl<T: Scalar> DiscretizedRoute<T> {
    /// Position of point `i`; `distance_at(N)` is exactly `D`.
    pub fn distance_at(&self, i: usize) -> T {
        if i == self.n_segments {
            self.total_distance_m
        } else {
            self.total_distance_m * lit::<T>(i as f64) / lit::<T>(self.n_segments as f64)
        }
    }

    pub fn distances(&self) -> Vec<T> {
        (0..=self.n_segments).map(|i| self.distance_at(i)).collect()
    }

    /// Mean gradient of each segment in permille.
    pub fn segment_gradient_permille(&self) -> Vec<T> {
        self.altitude_change_m
            .iter()
            .map(|&dh| dh / self.segment_length_m * lit(1000.0))
            .collect()
    }

    pub fn cast<U: Scalar>(&self) -> DiscretizedRoute<U> {
        let c = |x: T| lit::<U>(to_f64(x));
        DiscretizedRoute {
            n_segments: self.n_segments,
            total_distance_m: c(self.total_distance_m),
            segment_length_m: c(self.segment_length_m),
            altitude_change_m: self.altitude_change_m.iter().map(|&x| c(x)).collect(),
            point_speed_limit_mps: self.point_speed_limit_mps.iter().map(|&x| c(x)).collect(),
            start_speed_mps: c(self.start_speed_mps),
            end_speed_mps: c(self.end_speed_mps),
        }
    }
}

/// Slices `route` into `n` equal segments.
///
/// The altitude change of a segment is the difference of the integrated
/// elevation profile at its ends, i.e. the length-weighted mean gradient times
/// `Δd`. The limit at an interior point is the tighter of the limits over its
/// two adjacent segments.
pub fn discretize<T: Scalar>(
    route: &RouteProfile,
    n: usize,
    boundaries: Boundaries,
) -> Result<DiscretizedRoute<T>, IngestError> {
    if n < 2 {
        return Err(IngestError::Segments(n));
    }
    let d = route.total_distance_m();
    let point = |i: usize| if i == n { d } else { d * i as f64 / n as f64 };

    let altitude_change_m = (1..=n)
        .map(|i| lit(route.altitude_change(point(i - 1), point(i))))
        .collect();
    let segment_limits: Vec<f64> = (1..=n)
        .map(|i| route.min_limit_over(point(i - 1), point(i)))
        .collect();
    let mut point_limits = Vec::with_capacity(n + 1);
    point_limits.push(segment_limits[0]);
    for w in segment_limits.windows(2) {
        point_limits.push(w[0].min(w[1]));
    }
    point_limits.push(segment_limits[n - 1]);

    for (which, speed, limit) in [
        ("start", boundaries.start_mps, point_limits[0]),
        ("end", boundaries.end_mps, point_limits[n]),
    ] {
        if !(speed >= 0.0) {
            return Err(IngestError::NegativeSpeed(speed));
        }
        if speed > limit {
            return Err(IngestError::BoundarySpeed { which, speed, limit });
        }
    }

    Ok(DiscretizedRoute {
        n_segments: n,
        total_distance_m: lit(d),
        segment_length_m: lit(d / n as f64),
        altitude_change_m,
        point_speed_limit_mps: point_limits.into_iter().map(lit).collect(),
        start_speed_mps: lit(boundaries.start_mps),
        end_speed_mps: lit(boundaries.end_mps),
    })
}

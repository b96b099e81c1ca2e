use serde::{Deserialize, Serialize};

use super::IngestError;

const MAX_ABS_GRADIENT_PERMILLE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientInterval {
    pub from_m: f64,
    pub to_m: f64,
    pub permille: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitInterval {
    pub from_m: f64,
    pub to_m: f64,
    pub kmh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteFile {
    pub total_distance_m: f64,
    pub gradients: Vec<GradientInterval>,
    pub speed_limits: Vec<LimitInterval>,
}

/// A validated interval of constant speed limit, in m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedLimit {
    pub from_m: f64,
    pub to_m: f64,
    pub limit_mps: f64,
}

/// Inter-station route: gradient and speed-limit intervals that each tile `[0, D]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteProfile {
    total_distance_m: f64,
    gradients: Vec<GradientInterval>,
    limits: Vec<SpeedLimit>,
}

impl RouteProfile {
    pub fn new(
        total_distance_m: f64,
        gradients: Vec<GradientInterval>,
        limits: Vec<SpeedLimit>,
    ) -> Result<Self, IngestError> {
        if !(total_distance_m.is_finite() && total_distance_m > 0.0) {
            return Err(IngestError::Distance(total_distance_m));
        }
        let spans: Vec<_> = gradients.iter().map(|g| (g.from_m, g.to_m)).collect();
        check_coverage("gradients", &spans, total_distance_m)?;
        let spans: Vec<_> = limits.iter().map(|l| (l.from_m, l.to_m)).collect();
        check_coverage("speed_limits", &spans, total_distance_m)?;
        for g in &gradients {
            if !(g.permille.abs() < MAX_ABS_GRADIENT_PERMILLE) {
                return Err(IngestError::Gradient(g.permille));
            }
        }
        for l in &limits {
            if !(l.limit_mps.is_finite() && l.limit_mps > 0.0) {
                return Err(IngestError::SpeedLimit(l.limit_mps * 3.6));
            }
        }
        Ok(Self {
            total_distance_m,
            gradients,
            limits,
        })
    }

    /// Flat route with one speed limit.
    pub fn flat(total_distance_m: f64, limit_kmh: f64) -> Result<Self, IngestError> {
        Self::new(
            total_distance_m,
            vec![GradientInterval {
                from_m: 0.0,
                to_m: total_distance_m,
                permille: 0.0,
            }],
            vec![SpeedLimit {
                from_m: 0.0,
                to_m: total_distance_m,
                limit_mps: limit_kmh / 3.6,
            }],
        )
    }

    pub fn total_distance_m(&self) -> f64 {
        self.total_distance_m
    }

    pub fn gradients(&self) -> &[GradientInterval] {
        &self.gradients
    }

    pub fn limits(&self) -> &[SpeedLimit] {
        &self.limits
    }

    /// Elevation above the start point at distance `x`, clamped to `[0, D]`.
    pub fn elevation_at(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.total_distance_m);
        let mut h = 0.0;
        for g in &self.gradients {
            if x <= g.from_m {
                break;
            }
            h += g.permille * 1e-3 * (x.min(g.to_m) - g.from_m);
        }
        h
    }

    /// Elevation change between two positions.
    pub fn altitude_change(&self, from_m: f64, to_m: f64) -> f64 {
        self.elevation_at(to_m) - self.elevation_at(from_m)
    }

    /// Gradient (permille) at position `x`; at interval boundaries the interval
    /// starting at `x` wins.
    pub fn gradient_at(&self, x: f64) -> f64 {
        self.gradients
            .iter()
            .find(|g| x >= g.from_m && x < g.to_m)
            .or(self.gradients.last())
            .map_or(0.0, |g| g.permille)
    }

    /// Most restrictive limit over `[from_m, to_m]`, counting only intervals
    /// that overlap the span with positive length.
    pub fn min_limit_over(&self, from_m: f64, to_m: f64) -> f64 {
        let mut best = f64::INFINITY;
        for l in &self.limits {
            if l.to_m > from_m && l.from_m < to_m {
                best = best.min(l.limit_mps);
            }
        }
        if best.is_finite() {
            best
        } else {
            // zero-length span: fall back to the interval containing the point
            self.limits
                .iter()
                .find(|l| from_m >= l.from_m && from_m <= l.to_m)
                .map_or(f64::INFINITY, |l| l.limit_mps)
        }
    }
}

fn check_coverage(
    what: &'static str,
    spans: &[(f64, f64)],
    total: f64,
) -> Result<(), IngestError> {
    let tol = 1e-9 * total.max(1.0);
    let Some(&(first, _)) = spans.first() else {
        return Err(IngestError::Coverage {
            what,
            detail: "no intervals".into(),
        });
    };
    if first.abs() > tol {
        return Err(IngestError::Coverage {
            what,
            detail: format!("first interval starts at {first} m, not 0"),
        });
    }
    let mut cursor = 0.0;
    for &(from, to) in spans {
        if !(to > from) {
            return Err(IngestError::Coverage {
                what,
                detail: format!("empty or reversed interval [{from}, {to}]"),
            });
        }
        if from < cursor - tol {
            return Err(IngestError::Overlap {
                what,
                at_m: from,
            });
        }
        if from > cursor + tol {
            return Err(IngestError::Coverage {
                what,
                detail: format!("gap between {cursor} m and {from} m"),
            });
        }
        cursor = to;
    }
    if (cursor - total).abs() > tol {
        return Err(IngestError::Coverage {
            what,
            detail: format!("intervals end at {cursor} m, route length is {total} m"),
        });
    }
    Ok(())
}

/// Parses a route JSON document; speed limits are converted from km/h to m/s.
pub fn parse_route(text: &str) -> Result<RouteProfile, IngestError> {
    let file: RouteFile = serde_json::from_str(text)?;
    RouteProfile::try_from(file)
}

impl TryFrom<RouteFile> for RouteProfile {
    type Error = IngestError;

    fn try_from(file: RouteFile) -> Result<Self, Self::Error> {
        for l in &file.speed_limits {
            if !(l.kmh > 0.0) {
                return Err(IngestError::SpeedLimit(l.kmh));
            }
        }
        let limits = file
            .speed_limits
            .iter()
            .map(|l| SpeedLimit {
                from_m: l.from_m,
                to_m: l.to_m,
                limit_mps: l.kmh / 3.6,
            })
            .collect();
        RouteProfile::new(file.total_distance_m, file.gradients, limits)
    }
}

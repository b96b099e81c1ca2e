//! Rolling-stock and route input: engineering-unit JSON in, SI types out.

mod discretize;
mod route;
mod stock;

pub use discretize::{discretize, Boundaries, DiscretizedRoute};
pub use route::{
    parse_route, GradientInterval, LimitInterval, RouteFile, RouteProfile, SpeedLimit,
};
pub use stock::{davis_resistance, parse_rolling_stock, RollingStock, StockFile};

/// Standard gravity used for potential-energy terms, m/s².
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("field `{0}` is not a number")]
    NotANumber(&'static str),
    #[error("field `{0}` must be strictly positive")]
    NonPositive(&'static str),
    #[error("efficiency `{0}` out of range (each in (0, 1], product below 1)")]
    Efficiency(&'static str),
    #[error("route length must be positive, got {0} m")]
    Distance(f64),
    #[error("{what}: {detail}")]
    Coverage { what: &'static str, detail: String },
    #[error("{what}: interval starting at {at_m} m overlaps its predecessor")]
    Overlap { what: &'static str, at_m: f64 },
    #[error("speed limit must be positive, got {0} km/h")]
    SpeedLimit(f64),
    #[error("gradient {0} permille outside (-100, 100)")]
    Gradient(f64),
    #[error("speed must be non-negative, got {0} m/s")]
    NegativeSpeed(f64),
    #[error("need at least 2 segments, got {0}")]
    Segments(usize),
    #[error("{which} boundary speed {speed} m/s exceeds local limit {limit} m/s")]
    BoundarySpeed {
        which: &'static str,
        speed: f64,
        limit: f64,
    },
}

//! Built-in instances: the metro rolling stock and the synthetic routes used
//! by the tests, the benchmark and the examples.

use crate::ingest::{parse_rolling_stock, parse_route, RollingStock, RouteProfile};

pub const METRO_STOCK_JSON: &str = include_str!("../data/metro_stock.json");
pub const FLAT_ROUTE_JSON: &str = include_str!("../data/flat_route.json");
pub const HILLY_ROUTE_JSON: &str = include_str!("../data/hilly_route.json");

/// Distance between the two stations of the synthetic instance, m.
pub const SYNTHETIC_DISTANCE_M: f64 = 2707.0;
/// Scheduled running time of the synthetic instance, s.
pub const SYNTHETIC_TIME_S: f64 = 140.0;
/// Segment count of the synthetic instance.
pub const SYNTHETIC_SEGMENTS: usize = 238;

pub fn metro_stock() -> RollingStock<f64> {
    parse_rolling_stock(METRO_STOCK_JSON).expect("bundled stock file is valid")
}

/// Flat 2707 m route with a uniform 80 km/h limit.
pub fn synthetic_route() -> RouteProfile {
    parse_route(FLAT_ROUTE_JSON).expect("bundled route file is valid")
}

/// Same length with varying gradient and limits.
pub fn hilly_route() -> RouteProfile {
    parse_route(HILLY_ROUTE_JSON).expect("bundled route file is valid")
}

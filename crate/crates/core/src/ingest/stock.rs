use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::IngestError;
use crate::scalar::{lit, Scalar};

const KMH_PER_MPS: f64 = 3.6;
const KILO: f64 = 1000.0;

/// Train parameters in coherent SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingStock<T> {
    pub mass_kg: T,
    pub max_tractive_effort_n: T,
    pub max_braking_effort_n: T,
    pub max_traction_power_w: T,
    pub max_braking_power_w: T,
    pub traction_efficiency: T,
    pub braking_efficiency: T,
    /// Davis constant term, N.
    pub davis_a_n: T,
    /// Davis linear term, N/(m/s).
    pub davis_b_n_per_mps: T,
    /// Davis quadratic term, N/(m/s)².
    pub davis_c_n_per_mps2: T,
}

/// On-disk representation in engineering units (t, kN, kW, km/h).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StockFile {
    pub mass_t: f64,
    #[serde(rename = "max_tractive_effort_kN")]
    pub max_tractive_effort_kn: f64,
    #[serde(rename = "max_braking_effort_kN")]
    pub max_braking_effort_kn: f64,
    #[serde(rename = "max_traction_power_kW")]
    pub max_traction_power_kw: f64,
    #[serde(rename = "max_braking_power_kW")]
    pub max_braking_power_kw: f64,
    pub eta_traction: f64,
    pub eta_braking: f64,
    #[serde(rename = "davis_A_kN")]
    pub davis_a_kn: f64,
    #[serde(rename = "davis_B_kN_per_kmh")]
    pub davis_b_kn_per_kmh: f64,
    #[serde(rename = "davis_C_kN_per_kmh2")]
    pub davis_c_kn_per_kmh2: f64,
}

const STOCK_KEYS: [&str; 10] = [
    "mass_t",
    "max_tractive_effort_kN",
    "max_braking_effort_kN",
    "max_traction_power_kW",
    "max_braking_power_kW",
    "eta_traction",
    "eta_braking",
    "davis_A_kN",
    "davis_B_kN_per_kmh",
    "davis_C_kN_per_kmh2",
];

/// Parses a rolling-stock JSON document given in engineering units and
/// converts it to SI.
pub fn parse_rolling_stock(text: &str) -> Result<RollingStock<f64>, IngestError> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| IngestError::Schema("stock document must be a JSON object".into()))?;
    let mut values = [0.0; STOCK_KEYS.len()];
    for (slot, key) in values.iter_mut().zip(STOCK_KEYS) {
        let v = obj.get(key).ok_or(IngestError::MissingField(key))?;
        *slot = v.as_f64().ok_or(IngestError::NotANumber(key))?;
    }
    let [mass_t, ft, fb, pt, pb, eta_t, eta_b, a, b, c] = values;
    StockFile {
        mass_t,
        max_tractive_effort_kn: ft,
        max_braking_effort_kn: fb,
        max_traction_power_kw: pt,
        max_braking_power_kw: pb,
        eta_traction: eta_t,
        eta_braking: eta_b,
        davis_a_kn: a,
        davis_b_kn_per_kmh: b,
        davis_c_kn_per_kmh2: c,
    }
    .to_si()
}

impl StockFile {
    pub fn to_si(&self) -> Result<RollingStock<f64>, IngestError> {
        let stock = RollingStock {
            mass_kg: self.mass_t * KILO,
            max_tractive_effort_n: self.max_tractive_effort_kn * KILO,
            max_braking_effort_n: self.max_braking_effort_kn * KILO,
            max_traction_power_w: self.max_traction_power_kw * KILO,
            max_braking_power_w: self.max_braking_power_kw * KILO,
            traction_efficiency: self.eta_traction,
            braking_efficiency: self.eta_braking,
            davis_a_n: self.davis_a_kn * KILO,
            davis_b_n_per_mps: self.davis_b_kn_per_kmh * KILO * KMH_PER_MPS,
            davis_c_n_per_mps2: self.davis_c_kn_per_kmh2 * KILO * KMH_PER_MPS * KMH_PER_MPS,
        };
        stock.validate()?;
        Ok(stock)
    }
}

impl<T: Scalar> RollingStock<T> {
    pub fn validate(&self) -> Result<(), IngestError> {
        let named = [
            ("mass_t", self.mass_kg),
            ("max_tractive_effort_kN", self.max_tractive_effort_n),
            ("max_braking_effort_kN", self.max_braking_effort_n),
            ("max_traction_power_kW", self.max_traction_power_w),
            ("max_braking_power_kW", self.max_braking_power_w),
            ("eta_traction", self.traction_efficiency),
            ("eta_braking", self.braking_efficiency),
            ("davis_A_kN", self.davis_a_n),
            ("davis_B_kN_per_kmh", self.davis_b_n_per_mps),
            ("davis_C_kN_per_kmh2", self.davis_c_n_per_mps2),
        ];
        for (key, v) in named {
            if !(v.is_finite() && v > T::zero()) {
                return Err(IngestError::NonPositive(key));
            }
        }
        for (key, eta) in [
            ("eta_traction", self.traction_efficiency),
            ("eta_braking", self.braking_efficiency),
        ] {
            if eta > T::one() {
                return Err(IngestError::Efficiency(key));
            }
        }
        // traction/regeneration cycling would be profitable otherwise
        if self.traction_efficiency * self.braking_efficiency >= T::one() {
            return Err(IngestError::Efficiency("eta_traction * eta_braking"));
        }
        Ok(())
    }

    /// Converts back to the engineering units used on disk.
    pub fn to_file(&self) -> StockFile {
        let f = |x: T| crate::scalar::to_f64(x);
        StockFile {
            mass_t: f(self.mass_kg) / KILO,
            max_tractive_effort_kn: f(self.max_tractive_effort_n) / KILO,
            max_braking_effort_kn: f(self.max_braking_effort_n) / KILO,
            max_traction_power_kw: f(self.max_traction_power_w) / KILO,
            max_braking_power_kw: f(self.max_braking_power_w) / KILO,
            eta_traction: f(self.traction_efficiency),
            eta_braking: f(self.braking_efficiency),
            davis_a_kn: f(self.davis_a_n) / KILO,
            davis_b_kn_per_kmh: f(self.davis_b_n_per_mps) / (KILO * KMH_PER_MPS),
            davis_c_kn_per_kmh2: f(self.davis_c_n_per_mps2) / (KILO * KMH_PER_MPS * KMH_PER_MPS),
        }
    }

    /// Casts every field into another scalar type.
    pub fn cast<U: Scalar>(&self) -> RollingStock<U> {
        let c = |x: T| lit::<U>(crate::scalar::to_f64(x));
        RollingStock {
            mass_kg: c(self.mass_kg),
            max_tractive_effort_n: c(self.max_tractive_effort_n),
            max_braking_effort_n: c(self.max_braking_effort_n),
            max_traction_power_w: c(self.max_traction_power_w),
            max_braking_power_w: c(self.max_braking_power_w),
            traction_efficiency: c(self.traction_efficiency),
            braking_efficiency: c(self.braking_efficiency),
            davis_a_n: c(self.davis_a_n),
            davis_b_n_per_mps: c(self.davis_b_n_per_mps),
            davis_c_n_per_mps2: c(self.davis_c_n_per_mps2),
        }
    }

    /// Davis running resistance `A + B v + C v²` without the sign check.
    #[inline]
    pub(crate) fn resistance(&self, v: T) -> T {
        self.davis_a_n + (self.davis_b_n_per_mps + self.davis_c_n_per_mps2 * v) * v
    }
}

/// Running resistance in N at speed `v` (m/s).
pub fn davis_resistance<T: Scalar>(stock: &RollingStock<T>, v: T) -> Result<T, IngestError> {
    if !(v >= T::zero()) {
        return Err(IngestError::NegativeSpeed(crate::scalar::to_f64(v)));
    }
    Ok(stock.resistance(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const METRO: &str = include_str!("../../data/metro_stock.json");

    #[test]
    fn converts_engineering_units() {
        let s = parse_rolling_stock(METRO).unwrap();
        assert_eq!(s.mass_kg, 144_000.0);
        assert_relative_eq!(s.davis_b_n_per_mps, 72.576, max_relative = 1e-12);
        assert_relative_eq!(s.davis_c_n_per_mps2, 9.032_083_2, max_relative = 1e-12);
        assert_relative_eq!(s.max_traction_power_w, 2.52e6);
    }

    #[test]
    fn davis_values() {
        let s = parse_rolling_stock(METRO).unwrap();
        assert_relative_eq!(davis_resistance(&s, 0.0).unwrap(), 3001.6, max_relative = 1e-12);
        assert_relative_eq!(davis_resistance(&s, 20.0).unwrap(), 8065.9533, max_relative = 1e-6);
        let v100 = 100.0 / 3.6;
        assert!((davis_resistance(&s, v100).unwrap() - 11987.0).abs() < 1.0);
        assert!(davis_resistance(&s, -1.0).is_err());
    }

    #[test]
    fn rejects_bad_documents() {
        let mut doc: Value = serde_json::from_str(METRO).unwrap();
        doc.as_object_mut().unwrap().remove("davis_A_kN");
        assert!(matches!(
            parse_rolling_stock(&doc.to_string()),
            Err(IngestError::MissingField("davis_A_kN"))
        ));

        let mut doc: Value = serde_json::from_str(METRO).unwrap();
        doc["mass_t"] = (-1.0).into();
        assert!(matches!(
            parse_rolling_stock(&doc.to_string()),
            Err(IngestError::NonPositive("mass_t"))
        ));

        let mut doc: Value = serde_json::from_str(METRO).unwrap();
        doc["eta_braking"] = 1.2.into();
        assert!(matches!(parse_rolling_stock(&doc.to_string()), Err(IngestError::Efficiency(_))));

        let mut doc: Value = serde_json::from_str(METRO).unwrap();
        doc["eta_braking"] = 1.0.into();
        doc["eta_traction"] = 1.0.into();
        assert!(matches!(parse_rolling_stock(&doc.to_string()), Err(IngestError::Efficiency(_))));

        assert!(matches!(parse_rolling_stock("[1, 2]"), Err(IngestError::Schema(_))));
        assert!(matches!(parse_rolling_stock("{"), Err(IngestError::Json(_))));
    }

    proptest::proptest! {
        #[test]
        fn engineering_units_round_trip(
            mass in 10.0f64..1000.0,
            ft in 10.0f64..800.0,
            pt in 100.0f64..9000.0,
            eta_t in 0.5f64..1.0,
            eta_b in 0.1f64..0.99,
            a in 0.1f64..20.0,
            b in 1e-4f64..1e-1,
            c in 1e-5f64..1e-2,
        ) {
            let file = StockFile {
                mass_t: mass,
                max_tractive_effort_kn: ft,
                max_braking_effort_kn: 0.9 * ft,
                max_traction_power_kw: pt,
                max_braking_power_kw: 1.1 * pt,
                eta_traction: eta_t,
                eta_braking: eta_b,
                davis_a_kn: a,
                davis_b_kn_per_kmh: b,
                davis_c_kn_per_kmh2: c,
            };
            let back = file.to_si().unwrap().to_file();
            let pairs = [
                (file.mass_t, back.mass_t),
                (file.max_tractive_effort_kn, back.max_tractive_effort_kn),
                (file.max_braking_effort_kn, back.max_braking_effort_kn),
                (file.max_traction_power_kw, back.max_traction_power_kw),
                (file.max_braking_power_kw, back.max_braking_power_kw),
                (file.eta_traction, back.eta_traction),
                (file.eta_braking, back.eta_braking),
                (file.davis_a_kn, back.davis_a_kn),
                (file.davis_b_kn_per_kmh, back.davis_b_kn_per_kmh),
                (file.davis_c_kn_per_kmh2, back.davis_c_kn_per_kmh2),
            ];
            for (x, y) in pairs {
                proptest::prop_assert!((x - y).abs() <= 1e-12 * x.abs(), "{x} vs {y}");
            }
        }

        #[test]
        fn resistance_increases_with_speed(mut vs in proptest::collection::vec(0.0f64..60.0, 2..40)) {
            let s = parse_rolling_stock(METRO).unwrap();
            vs.sort_by(f64::total_cmp);
            vs.dedup();
            for w in vs.windows(2) {
                proptest::prop_assert!(davis_resistance(&s, w[1]).unwrap() > davis_resistance(&s, w[0]).unwrap());
            }
        }
    }
}

//! Durations in whole nanoseconds, plus the display helpers shared by the
//! report renderers.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

const NS_PER_US: u64 = 1_000;
const NS_PER_MS: u64 = 1_000_000;
const NS_PER_S: u64 = 1_000_000_000;

/// Display units, smallest first. Months are 30 days and years 365 days.
const DISPLAY_UNITS: [(f64, &str, &str); 9] = [
    (1.0, "ns", "ns"),
    (1e3, "µs", "µs"),
    (1e6, "ms", "ms"),
    (1e9, "sec", "secs"),
    (6e10, "min", "mins"),
    (3.6e12, "hour", "hours"),
    (8.64e13, "day", "days"),
    (2.592e15, "month", "months"),
    (3.1536e16, "year", "years"),
];

/// A duration stored as an exact count of nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Nanos(pub u64);

impl Nanos {
    pub const ZERO: Nanos = Nanos(0);

    pub const fn from_ns(ns: u64) -> Self {
        Nanos(ns)
    }

    pub const fn from_us(us: u64) -> Self {
        Nanos(us * NS_PER_US)
    }

    pub const fn from_ms(ms: u64) -> Self {
        Nanos(ms * NS_PER_MS)
    }

    pub const fn as_ns(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NS_PER_S as f64
    }

    pub fn checked_mul(self, factor: u64) -> Option<Nanos> {
        self.0.checked_mul(factor).map(Nanos)
    }

    pub fn checked_add(self, other: Nanos) -> Option<Nanos> {
        self.0.checked_add(other.0).map(Nanos)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Human-readable form using the largest unit whose mantissa is >= 1.
    pub fn human(self, sig_figs: usize) -> String {
        format_duration(self.0 as f64, sig_figs)
    }
}

impl fmt::Display for Nanos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.human(4))
    }
}

/// Formats a nanosecond quantity (possibly fractional) for display.
pub fn format_duration(ns: f64, sig_figs: usize) -> String {
    let mut idx = 0;
    for (i, (scale, _, _)) in DISPLAY_UNITS.iter().enumerate() {
        if ns >= *scale {
            idx = i;
        }
    }
    let (scale, singular, plural) = DISPLAY_UNITS[idx];
    let mantissa = format_sig(ns / scale, sig_figs);
    let unit = if mantissa == "1" || mantissa == "1.0" {
        singular
    } else {
        plural
    };
    format!("{mantissa} {unit}")
}

/// Rounds to `sig` significant figures; integer digits beyond `sig` are kept.
pub fn format_sig(value: f64, sig: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let sig = sig.max(1) as i32;
    let magnitude = value.abs().log10().floor() as i32;
    let factor = 10f64.powi(sig - 1 - magnitude);
    let rounded = (value * factor).round() / factor;
    // rounding can carry into a new digit (9.96 -> 10)
    let magnitude = rounded.abs().log10().floor() as i32;
    let decimals = (sig - 1 - magnitude).max(0) as usize;
    format!("{rounded:.decimals$}")
}

/// Serialized form in reports: `{"ns": 5200, "human": "5.2 µs"}`.
impl Serialize for Nanos {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Nanos", 2)?;
        s.serialize_field("ns", &self.0)?;
        s.serialize_field("human", &self.human(4))?;
        s.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NanosRepr {
    Report {
        ns: u64,
        #[allow(dead_code)]
        #[serde(default)]
        human: Option<String>,
    },
    Value(TimeValue),
}

/// Accepts either the report form or the `{"value", "unit"}` form.
impl<'de> Deserialize<'de> for Nanos {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match NanosRepr::deserialize(deserializer)? {
            NanosRepr::Report { ns, .. } => Ok(Nanos(ns)),
            NanosRepr::Value(v) => v.to_nanos().map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeUnit {
    #[serde(rename = "ns")]
    Ns,
    #[serde(rename = "us", alias = "µs")]
    Us,
    #[serde(rename = "ms")]
    Ms,
}

impl TimeUnit {
    fn scale(self) -> u64 {
        match self {
            TimeUnit::Ns => 1,
            TimeUnit::Us => NS_PER_US,
            TimeUnit::Ms => NS_PER_MS,
        }
    }
}

/// A time in the job-file form `{"value": 100, "unit": "us"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeValue {
    pub value: f64,
    pub unit: TimeUnit,
}

impl TimeValue {
    pub fn to_nanos(self) -> Result<Nanos, String> {
        let ns = self.value * self.unit.scale() as f64;
        if !ns.is_finite() || ns < 0.0 || ns > u64::MAX as f64 {
            return Err(format!(
                "time {} {:?} is out of range",
                self.value, self.unit
            ));
        }
        let rounded = ns.round();
        if (rounded - ns).abs() > 1e-6 * ns.max(1.0) {
            return Err(format!(
                "time {} {:?} is not a whole number of nanoseconds",
                self.value, self.unit
            ));
        }
        Ok(Nanos(rounded as u64))
    }

    /// The largest unit that represents `ns` exactly.
    pub fn from_nanos(ns: Nanos) -> Self {
        let unit = if ns.0 != 0 && ns.0.is_multiple_of(NS_PER_MS) {
            TimeUnit::Ms
        } else if ns.0 != 0 && ns.0.is_multiple_of(NS_PER_US) {
            TimeUnit::Us
        } else {
            TimeUnit::Ns
        };
        TimeValue {
            value: (ns.0 / unit.scale()) as f64,
            unit,
        }
    }
}

/// Serde adapter writing a duration as `{"value", "unit"}`.
pub mod time_value {
    use super::*;

    pub fn serialize<S: Serializer>(ns: &Nanos, serializer: S) -> Result<S::Ok, S::Error> {
        TimeValue::from_nanos(*ns).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Nanos, D::Error> {
        TimeValue::deserialize(deserializer)?
            .to_nanos()
            .map_err(de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            ns: &Option<Nanos>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            ns.map(TimeValue::from_nanos).serialize(serializer)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            deserializer: D,
        ) -> Result<Option<Nanos>, D::Error> {
            Option::<TimeValue>::deserialize(deserializer)?
                .map(|v| v.to_nanos().map_err(de::Error::custom))
                .transpose()
        }
    }
}

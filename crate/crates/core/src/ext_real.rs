//! Nonnegative extended reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute tolerance for distance and weight comparisons.
///
/// Integer inputs never come within this distance of a decision boundary, so
/// integer spaces are decided exactly.
pub const TOL: f64 = 1e-9;

/// A value in `[0, ∞]`.
///
/// Finite values are `f64`; integers up to 2^53 are represented exactly.
/// Serialized as a JSON number, or as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INF: ExtReal = ExtReal(f64::INFINITY);

    /// Returns `None` for negative values and NaN.
    pub fn new(value: f64) -> Option<Self> {
        if value.is_nan() || value < 0.0 {
            None
        } else {
            Some(ExtReal(value))
        }
    }

    /// Panics on negative or NaN input; meant for literals.
    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite() && value >= 0.0, "invalid finite extended real {value}");
        ExtReal(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `self ≤ other` up to [`TOL`].
    pub fn le_tol(self, other: ExtReal) -> bool {
        within(self.0, other.0)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &ExtReal) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<u32> for ExtReal {
    fn from(v: u32) -> Self {
        ExtReal(v as f64)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `d ≤ r` up to tolerance; `∞ ≤ ∞` holds.
#[inline]
pub(crate) fn within(d: f64, r: f64) -> bool {
    d <= r + TOL
}

/// `d > r` beyond tolerance; nothing exceeds `∞`.
#[inline]
pub(crate) fn exceeds(d: f64, r: f64) -> bool {
    d > r + TOL
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_inf() {
            serializer.serialize_str("inf")
        } else if self.0.fract() == 0.0 && self.0 < 9.0e15 {
            serializer.serialize_u64(self.0 as u64)
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

struct ExtRealVisitor;

impl<'de> Visitor<'de> for ExtRealVisitor {
    type Value = ExtReal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a nonnegative number or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
        if v.is_infinite() {
            return Err(E::custom("infinite distances must be written as \"inf\""));
        }
        ExtReal::new(v).ok_or_else(|| E::custom(format!("negative or NaN value {v}")))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
        Ok(ExtReal(v as f64))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
        if v < 0 {
            Err(E::custom(format!("negative value {v}")))
        } else {
            Ok(ExtReal(v as f64))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
        if v == "inf" {
            Ok(ExtReal::INF)
        } else {
            Err(E::custom(format!("unexpected string {v:?}, only \"inf\" is allowed")))
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ExtRealVisitor)
    }
}

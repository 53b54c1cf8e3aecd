//! Extended nonnegative costs with an exact symbolic infinity.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute tolerance used for every floating comparison in the crate.
pub const TOL: f64 = 1e-9;

/// A nonnegative cost that may be symbolically infinite.
///
/// Infinity is a distinct variant, never an overflowed float, so deadline
/// violations compare strictly above every finite cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cost {
    Finite(f64),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cost::Infinite)
    }

    /// The finite value, if any.
    pub fn as_finite(self) -> Option<f64> {
        match self {
            Cost::Finite(x) => Some(x),
            Cost::Infinite => None,
        }
    }

    /// Lossy view as `f64`, mapping the symbolic infinity to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            Cost::Finite(x) => x,
            Cost::Infinite => f64::INFINITY,
        }
    }

    pub fn min(self, other: Cost) -> Cost {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Cost) -> Cost {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Equality up to `tol`; two infinities are equal.
    pub fn approx_eq(self, other: Cost, tol: f64) -> bool {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => (a - b).abs() <= tol,
            (Cost::Infinite, Cost::Infinite) => true,
            _ => false,
        }
    }

    /// `self <= other + tol`.
    pub fn approx_le(self, other: Cost, tol: f64) -> bool {
        match (self, other) {
            (_, Cost::Infinite) => true,
            (Cost::Infinite, Cost::Finite(_)) => false,
            (Cost::Finite(a), Cost::Finite(b)) => a <= b + tol,
        }
    }
}

impl From<f64> for Cost {
    fn from(x: f64) -> Self {
        if x.is_infinite() && x > 0.0 {
            Cost::Infinite
        } else {
            Cost::Finite(x)
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.partial_cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Some(Ordering::Less),
            (Cost::Infinite, Cost::Finite(_)) => Some(Ordering::Greater),
            (Cost::Infinite, Cost::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Add<f64> for Cost {
    type Output = Cost;
    fn add(self, rhs: f64) -> Cost {
        self + Cost::Finite(rhs)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(x) => write!(f, "{x}"),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(x) => s.serialize_f64(*x),
            Cost::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct CostVisitor;
        impl Visitor<'_> for CostVisitor {
            type Value = Cost;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cost, E> {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(E::custom(format!("cost must be finite and nonnegative, got {v}")));
                }
                Ok(Cost::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cost, E> {
                Ok(Cost::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cost, E> {
                if v < 0 {
                    return Err(E::custom(format!("cost must be nonnegative, got {v}")));
                }
                Ok(Cost::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cost, E> {
                if v == "inf" {
                    Ok(Cost::Infinite)
                } else {
                    Err(E::custom(format!("unknown cost literal {v:?}")))
                }
            }
        }
        d.deserialize_any(CostVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_dominates() {
        assert!(Cost::Infinite > Cost::Finite(1e300));
        assert_eq!(Cost::Finite(1.0) + Cost::Infinite, Cost::Infinite);
        assert_eq!(Cost::Finite(3.0).min(Cost::Infinite), Cost::Finite(3.0));
    }

    #[test]
    fn sums_and_tolerance() {
        let s: Cost = [1.0, 2.0, 0.5].iter().map(|&x| Cost::Finite(x)).sum();
        assert!(s.approx_eq(Cost::Finite(3.5), TOL));
        assert!(Cost::Finite(1.0 + 1e-12).approx_le(Cost::Finite(1.0), TOL));
        assert!(!Cost::Infinite.approx_le(Cost::Finite(5.0), TOL));
    }

    #[test]
    fn serde_roundtrip() {
        let v: Vec<Cost> = serde_json::from_str(r#"[0, 1.5, "inf"]"#).unwrap();
        assert_eq!(v, vec![Cost::ZERO, Cost::Finite(1.5), Cost::Infinite]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[0.0,1.5,"inf"]"#);
        assert!(serde_json::from_str::<Cost>("-1").is_err());
        assert!(serde_json::from_str::<Cost>(r#""infinity""#).is_err());
    }
}

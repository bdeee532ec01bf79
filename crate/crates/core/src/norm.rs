//! `L^p` norms with exact tracking.
//!
//! A norm is a real number, and with exact scalars it is usually
//! irrational. [`Norm`] carries an `f64` value and, when every modulus
//! involved is rational, the exact rational value as well. Comparisons
//! use the exact value when both sides have one and otherwise fall back
//! to `f64` with a relative slack covering the square-root evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Relative slack for `f64`-evaluated norm comparisons.
pub const NORM_REL_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

/// Serialized as a number, or the string `"inf"`.
impl Serialize for Exponent {
    fn serialize<Sr: serde::Serializer>(&self, s: Sr) -> std::result::Result<Sr::Ok, Sr::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Exponent, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => {
                let p = n.as_f64().ok_or_else(|| D::Error::custom("bad exponent"))?;
                Exponent::new(p).map_err(D::Error::custom)
            }
            serde_json::Value::String(s) if matches!(s.as_str(), "inf" | "infinity") => {
                Ok(Exponent::Infinity)
            }
            other => Err(D::Error::custom(format!("invalid exponent {other}"))),
        }
    }
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);

    pub fn new(p: f64) -> Result<Exponent> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::BadExponent(p))
        }
    }

    pub fn validate(self) -> Result<Exponent> {
        match self {
            Exponent::Finite(p) => Exponent::new(p),
            Exponent::Infinity => Ok(self),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Norm {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl Norm {
    pub fn zero() -> Norm {
        Norm {
            value: 0.0,
            exact: Some(Rational::zero()),
        }
    }

    pub fn times(&self, other: &Norm) -> Norm {
        Norm {
            value: self.value * other.value,
            exact: match (&self.exact, &other.exact) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Equality: exact when both values are rational.
    pub fn same_as(&self, other: &Norm, rel: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => (self.value - other.value).abs() <= rel * (1.0 + self.value + other.value),
        }
    }

    /// `self ≤ other`, exact when both values are rational.
    pub fn at_most(&self, other: &Norm, rel: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a <= b,
            _ => self.value <= other.value + rel * (1.0 + other.value),
        }
    }

    /// Amount by which `self` exceeds `other`, zero when it does not.
    pub fn excess_over(&self, other: &Norm) -> f64 {
        (self.value - other.value).max(0.0)
    }
}

/// Weighted `L^p` norm of `(value, weight)` pairs.
///
/// Terms are summed in ascending order so that the `f64` result depends
/// only on the multiset of terms.
pub fn weighted_norm<'a, S: Scalar>(
    entries: impl Iterator<Item = (&'a S, f64)>,
    p: Exponent,
) -> Norm {
    match p {
        Exponent::Infinity => {
            let mut value: f64 = 0.0;
            let mut exact = Some(Rational::zero());
            for (v, _) in entries {
                value = value.max(v.modulus());
                exact = match (exact, v.modulus_exact()) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                };
            }
            Norm { value, exact }
        }
        Exponent::Finite(p) => {
            let mut terms = Vec::new();
            let mut exact = Some(Rational::zero());
            for (v, w) in entries {
                if v.is_zero() {
                    continue;
                }
                let m = v.modulus();
                terms.push(w * if p == 1.0 { m } else { m.powf(p) });
                exact = match exact {
                    Some(acc) if p == 1.0 => v
                        .modulus_exact()
                        .zip(Rational::from_f64(w))
                        .map(|(m, w)| &acc + &(&m * &w)),
                    Some(acc) if p == 2.0 => v
                        .modulus_exact()
                        .zip(Rational::from_f64(w))
                        .map(|(m, w)| &acc + &(&(&m * &m) * &w)),
                    _ => None,
                };
            }
            if terms.is_empty() {
                return Norm::zero();
            }
            terms.sort_by(f64::total_cmp);
            let sum: f64 = terms.iter().sum();
            if p == 1.0 {
                Norm { value: sum, exact }
            } else if p == 2.0 {
                Norm {
                    value: sum.sqrt(),
                    exact: exact.and_then(|s| s.sqrt_exact()),
                }
            } else {
                Norm {
                    value: sum.powf(1.0 / p),
                    exact: None,
                }
            }
        }
    }
}

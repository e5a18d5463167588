//! Scalar kinds carried by set functions.
//!
//! Two kinds exist and are never mixed within one instance: exact rationals
//! (arbitrary precision) and binary64 floats. Every comparison goes through
//! [`Scalar::le_tol`], which ignores the tolerance for exact scalars.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default tolerance for float instances, 2^-30.
pub const DEFAULT_TOL: f64 = 9.313225746154785e-10;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + Send
    + Sync
    + 'static
{
    /// Exact scalars ignore every caller tolerance.
    const EXACT: bool;
    const KIND: ScalarKind;

    fn from_rational(r: &Rational) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_value(&self) -> ScalarValue;
    fn abs(&self) -> Self;

    /// `self <= other + tol`, with `tol` forced to zero for exact kinds.
    fn le_tol(&self, other: &Self, tol: f64) -> bool;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.le_tol(other, tol) && other.le_tol(self, tol)
    }

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.approx_eq(&Self::zero(), tol)
    }

    fn scale(&self, w: &Rational) -> Self {
        Self::from_rational(w) * self.clone()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const KIND: ScalarKind = ScalarKind::Rational;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_value(&self) -> ScalarValue {
        ScalarValue::Rational(self.clone())
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn le_tol(&self, other: &Self, _tol: f64) -> bool {
        self <= other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_value(&self) -> ScalarValue {
        ScalarValue::Float(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn le_tol(&self, other: &Self, tol: f64) -> bool {
        *self <= *other + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Float,
}

/// A scalar of either kind, used in reports and JSON.
///
/// Rationals serialize as `"p/q"` strings, floats as JSON numbers.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Rational(Rational),
    Float(f64),
}

impl ScalarValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Rational(r) => Scalar::to_f64(r),
            ScalarValue::Float(x) => *x,
        }
    }
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Rational(r) => write!(f, "{}", format_rational(r)),
            ScalarValue::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ScalarValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScalarValue::Rational(r) => s.serialize_str(&format_rational(r)),
            ScalarValue::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ScalarValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => {
                parse_rational(&s).map(ScalarValue::Rational).map_err(serde::de::Error::custom)
            }
            serde_json::Value::Number(n) => {
                n.as_f64().map(ScalarValue::Float).ok_or_else(|| serde::de::Error::custom("number out of range"))
            }
            other => Err(serde::de::Error::custom(format!("expected a rational string or a number, got {other}"))),
        }
    }
}

/// Canonical text form: `p/q` in lowest terms, or `p` when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `-1.4` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            s => s.parse().map_err(|_| bad())?,
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = BigRational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

/// Exact embedding of a finite binary64 value.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    BigRational::from_float(x).ok_or_else(|| Error::Invalid(format!("non-finite value {x}")))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    BigRational::from_integer(BigInt::from(p))
}

/// Serde adapter for a `Rational` field stored as a `"p/q"` string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

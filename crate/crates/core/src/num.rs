//! Numeric backends.
//!
//! Every lottery type is generic over a [`Scalar`]. Two backends exist:
//! IEEE double precision (`f64`) and exact arbitrary-precision rationals
//! ([`Rational`]). The backends differ only in their equality rules; the
//! float backend treats values within a relative tolerance as equal, the
//! rational backend compares exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Relative tolerance for indifference between two rates in float mode.
pub const FLOAT_INDIFFERENCE_REL: f64 = 1e-9;
/// Relative tolerance for merging outcome keys in float mode.
pub const FLOAT_KEY_REL: f64 = 1e-12;
/// Allowed deviation of a probability sum from one in float mode.
pub const FLOAT_PROB_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumericMode {
    #[default]
    Float64,
    ExactRational,
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: NumericMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// `mantissa · 10^exp10`, exactly in rational mode and correctly rounded
    /// in float mode.
    fn from_decimal(mantissa: i64, exp10: i32) -> Self;

    /// Parses a finite decimal literal such as `0.7`, `-12`, or `1.5e-3`.
    fn parse_decimal(s: &str) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Equality rule for rates (indifference).
    fn same_rate(&self, other: &Self) -> bool;

    /// Equality rule for outcome keys when merging.
    fn same_key(&self, other: &Self) -> bool;

    /// Whether a probability total counts as one.
    fn is_unit_total(&self) -> bool;

    fn is_exact() -> bool {
        Self::MODE == NumericMode::ExactRational
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Orders two rates under the backend's equality rule.
pub fn cmp_rates<S: Scalar>(a: &S, b: &S) -> Ordering {
    if a.same_rate(b) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn rel_eq(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= rel * scale
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float64;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_decimal(mantissa: i64, exp10: i32) -> Self {
        // Going through the decimal string gives correct rounding.
        format!("{mantissa}e{exp10}")
            .parse()
            .expect("decimal literal")
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let v: f64 = s.trim().parse().ok()?;
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn same_rate(&self, other: &Self) -> bool {
        rel_eq(*self, *other, FLOAT_INDIFFERENCE_REL)
    }

    fn same_key(&self, other: &Self) -> bool {
        rel_eq(*self, *other, FLOAT_KEY_REL)
    }

    fn is_unit_total(&self) -> bool {
        (self - 1.0).abs() <= FLOAT_PROB_SUM_TOL
    }
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::ExactRational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_decimal(mantissa: i64, exp10: i32) -> Self {
        let ten = BigInt::from(10u8);
        let scale = num_traits::pow(ten, exp10.unsigned_abs() as usize);
        if exp10 >= 0 {
            Rational::from_integer(BigInt::from(mantissa) * scale)
        } else {
            Rational::new(BigInt::from(mantissa), scale)
        }
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        parse_decimal_rational(s.trim())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn same_rate(&self, other: &Self) -> bool {
        self == other
    }

    fn same_key(&self, other: &Self) -> bool {
        self == other
    }

    fn is_unit_total(&self) -> bool {
        self.is_one()
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

fn parse_decimal_rational(s: &str) -> Option<Rational> {
    let (body, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, body) = match body.as_bytes().first()? {
        b'-' => (true, &body[1..]),
        b'+' => (false, &body[1..]),
        _ => (false, body),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut mantissa = BigInt::from_str(&digits).ok()?;
    if negative {
        mantissa = -mantissa;
    }
    let exp10 = exp.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    let scale = num_traits::pow(BigInt::from(10u8), exp10.unsigned_abs() as usize);
    Some(if exp10 >= 0 {
        Rational::from_integer(mantissa * scale)
    } else {
        Rational::new(mantissa, scale)
    })
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        iter.for_each(|x| acc.add(x));
        acc
    }
}

//! Scalar abstractions.
//!
//! Two families of numbers appear in this crate. Continuous geometry (the
//! cotangent-bundle model, quadric fibrations) runs over [`Scalar`], any IEEE
//! float. Action values attached to Floer generators run over [`Grade`], which
//! additionally covers exact rationals so that gap and order tests can be made
//! without tolerance.

use std::fmt::{Debug, Display};
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Float, FloatConst, FromPrimitive, Zero};

/// Floating point type used by the continuous local model: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Error produced when parsing a grade from its textual form.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse grade from {0:?}")]
pub struct GradeParseError(pub String);

/// Real-valued action grade. Values are compared exactly as stored.
pub trait Grade:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// The rational `num / den`, rounded for inexact types.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(self) -> f64;

    /// `false` for NaN and infinities; always `true` for exact types.
    fn is_finite_grade(self) -> bool;

    /// Exact decimal rendering (falls back to `p/q` when no finite decimal exists).
    fn to_exact_string(&self) -> String;

    /// Inverse of [`Grade::to_exact_string`]; accepts decimals and `p/q`.
    fn parse_exact(s: &str) -> Result<Self, GradeParseError>;

    /// Nearest point of the lattice `(1/den) Z`, rounding towards `+inf`.
    fn snap_up(x: f64, den: i64) -> Self {
        Self::from_ratio((x * den as f64).ceil() as i64, den)
    }

    /// Nearest point of the lattice `(1/den) Z`, rounding towards `-inf`.
    fn snap_down(x: f64, den: i64) -> Self {
        Self::from_ratio((x * den as f64).floor() as i64, den)
    }

    /// Nearest point of the lattice `(1/den) Z`.
    fn snap(x: f64, den: i64) -> Self {
        Self::from_ratio((x * den as f64).round() as i64, den)
    }

    fn abs_grade(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

fn parse_ratio_str(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational64::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().ok()?
    };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Rational64::new(numer, denom);
    Some(if neg { -r } else { r })
}

fn rational_to_exact_string(r: &Rational64) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    // A finite decimal exists iff the denominator has no prime factors besides 2 and 5.
    let mut rest = d;
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 {
        return format!("{n}/{d}");
    }
    let places = twos.max(fives);
    let scale = 10i128.pow(places);
    let scaled = n as i128 * (scale / d as i128);
    let sign = if scaled < 0 { "-" } else { "" };
    let mag = scaled.unsigned_abs();
    if places == 0 {
        return format!("{sign}{mag}");
    }
    let int = mag / scale as u128;
    let frac = mag % scale as u128;
    format!("{sign}{int}.{frac:0width$}", width = places as usize)
}

impl Grade for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn is_finite_grade(self) -> bool {
        self.is_finite()
    }

    fn to_exact_string(&self) -> String {
        // Shortest round-trip representation; exact for lattice values k/1024.
        let s = format!("{self}");
        if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
            s
        } else {
            format!("{s}.0")
        }
    }

    fn parse_exact(s: &str) -> Result<Self, GradeParseError> {
        if let Some(r) = parse_ratio_str(s) {
            if s.contains('/') {
                return Ok(*r.numer() as f64 / *r.denom() as f64);
            }
        }
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| GradeParseError(s.to_string()))
    }
}

impl Grade for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn is_finite_grade(self) -> bool {
        self.is_finite()
    }

    fn to_exact_string(&self) -> String {
        let s = format!("{self}");
        if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
            s
        } else {
            format!("{s}.0")
        }
    }

    fn parse_exact(s: &str) -> Result<Self, GradeParseError> {
        <f64 as Grade>::parse_exact(s).map(|x| x as f32)
    }
}

impl Grade for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn is_finite_grade(self) -> bool {
        true
    }

    fn to_exact_string(&self) -> String {
        rational_to_exact_string(self)
    }

    fn parse_exact(s: &str) -> Result<Self, GradeParseError> {
        parse_ratio_str(s).ok_or_else(|| GradeParseError(s.to_string()))
    }
}

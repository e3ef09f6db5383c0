//! Numeric backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided: `f64` and the arbitrary-precision [`Rational`]. The rational
//! backend is exact: all tolerance tests collapse to comparisons with zero.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Field element used by the solver and the sensitivity routines.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Send + Sync + 'static + Num + Signed + ToPrimitive
{
    /// `true` when field operations never round.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    /// Converts a float. The rational backend takes the shortest decimal
    /// representation of `v`, so `0.001` becomes exactly `1/1000`.
    fn from_f64(v: f64) -> Self;

    /// Parses `"3"`, `"-0.25"`, `"1e-3"` or `"p/q"`.
    fn parse_literal(s: &str) -> Option<Self>;

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    /// Threshold below which a pivot element or reduced cost is treated as zero.
    fn pivot_tol() -> Self;

    /// `|self| <= pivot_tol()`.
    fn is_negligible(&self) -> bool {
        self.abs() <= Self::pivot_tol()
    }

    /// Degeneracy test: `|self| <= 1e-7 * (1 + scale)` on floats, `self == 0` when exact.
    fn is_degenerate_zero(&self, scale: &Self) -> bool;

    /// Sign with the convention `sgn(0) = +1`.
    fn sign(&self) -> i8 {
        if *self >= Self::zero() {
            1
        } else {
            -1
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            if q == 0.0 {
                return None;
            }
            return Some(p / q);
        }
        let v: f64 = s.parse().ok()?;
        v.is_finite().then_some(v)
    }

    fn pivot_tol() -> Self {
        1e-9
    }

    fn is_degenerate_zero(&self, scale: &Self) -> bool {
        self.abs() <= 1e-7 * (1.0 + scale.abs())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        // Display of f64 is the shortest string that round-trips.
        parse_decimal(&format!("{v}"))
            .or_else(|| <Rational as FromPrimitive>::from_f64(v))
            .unwrap_or_else(Rational::zero)
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_decimal(p.trim())?;
            let q = parse_decimal(q.trim())?;
            if q.is_zero() {
                return None;
            }
            return Some(p / q);
        }
        parse_decimal(s)
    }

    fn pivot_tol() -> Self {
        Rational::zero()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn is_degenerate_zero(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

/// Exact parse of a decimal literal such as `-12.5e-3`.
pub(crate) fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|ch| ch.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str_radix(&digits, 10).ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Largest absolute entry, zero for an empty slice.
pub fn max_abs<S: Scalar>(v: &[S]) -> S {
    v.iter()
        .map(|x| x.abs())
        .fold(S::zero(), |acc, x| if x > acc { x } else { acc })
}

/// Inner product.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Converts between backends through `f64` (lossy into floats, decimal-exact into rationals).
pub fn convert<S: Scalar, T: Scalar>(v: &S) -> T {
    T::from_f64(Scalar::as_f64(v))
}

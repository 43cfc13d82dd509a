//! Exact rational arithmetic helpers.
//!
//! All monetary quantities in this crate (costs, budgets, loads, capacities)
//! are `BigRational` values; nothing is ever rounded. This module provides
//! decimal-string parsing, the `+∞` price sentinel, and the `[num, den]`
//! JSON encoding used by certificates and traces.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Exact rational amount. Always kept in canonical reduced form with a
/// positive denominator (`BigRational` guarantees this).
pub type Ratio = BigRational;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum NumberError {
    #[error("cannot parse {0:?} as an exact decimal or fraction")]
    BadDecimal(String),
    #[error("value does not fit the [num, den] wire encoding")]
    OutOfRange,
}

/// Builds a ratio from two machine integers.
pub fn ratio(num: i64, den: i64) -> Ratio {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer-valued ratio.
pub fn int(value: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(value))
}

/// Parses a decimal string such as `"5258802"`, `"12.50"` or `"-0.125"`
/// into an exact rational. A plain fraction `"7/3"` is accepted as well.
pub fn parse_decimal(text: &str) -> Result<Ratio, NumberError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(NumberError::BadDecimal(text.to_string()));
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| NumberError::BadDecimal(text.into()))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| NumberError::BadDecimal(text.into()))?;
        if den.is_zero() {
            return Err(NumberError::BadDecimal(text.into()));
        }
        return Ok(Ratio::new(num, den));
    }
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text.strip_prefix('+').unwrap_or(text)),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(NumberError::BadDecimal(text.into()));
    }
    let valid = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if !valid(whole) || !valid(frac) {
        return Err(NumberError::BadDecimal(text.into()));
    }
    let mut num = if whole.is_empty() {
        BigInt::zero()
    } else {
        BigInt::from_str(whole).map_err(|_| NumberError::BadDecimal(text.into()))?
    };
    let mut den = BigInt::one();
    for c in frac.chars() {
        num = num * 10 + (c as u8 - b'0');
        den *= 10;
    }
    Ok(Ratio::new(num * sign, den))
}

/// Renders a ratio as `num` or `num/den`, losslessly.
pub fn display(value: &Ratio) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Exact `[num, den]` pair for JSON output. The wire format uses plain JSON
/// integers, so values are bounded by `i128`; domain quantities (currency
/// amounts and their small-denominator quotients) fit comfortably.
pub fn to_pair(value: &Ratio) -> Result<(i128, i128), NumberError> {
    let num = value.numer().to_i128().ok_or(NumberError::OutOfRange)?;
    let den = value.denom().to_i128().ok_or(NumberError::OutOfRange)?;
    Ok((num, den))
}

pub fn from_pair(num: i128, den: i128) -> Result<Ratio, NumberError> {
    if den == 0 {
        return Err(NumberError::OutOfRange);
    }
    Ok(Ratio::new(BigInt::from(num), BigInt::from(den)))
}

/// Per-voter price of a project: finite for selected projects, `+∞` for the
/// rest. The sentinel orders above every finite value and never enters
/// arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Price {
    Finite(Ratio),
    Infinite,
}

impl Price {
    pub fn as_finite(&self) -> Option<&Ratio> {
        match self {
            Price::Finite(r) => Some(r),
            Price::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Price::Infinite)
    }
}

impl PartialOrd for Price {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Price {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Price::Infinite, Price::Infinite) => Ordering::Equal,
            (Price::Infinite, Price::Finite(_)) => Ordering::Greater,
            (Price::Finite(_), Price::Infinite) => Ordering::Less,
            (Price::Finite(a), Price::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::Finite(r) => write!(f, "{}", display(r)),
            Price::Infinite => write!(f, "inf"),
        }
    }
}

/// Absolute difference.
pub fn abs_diff(a: &Ratio, b: &Ratio) -> Ratio {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_decimal("12.50").unwrap(), ratio(25, 2));
        assert_eq!(parse_decimal("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_decimal("-3").unwrap(), int(-3));
        assert_eq!(parse_decimal("7/3").unwrap(), ratio(7, 3));
        assert_eq!(parse_decimal("5258802").unwrap(), int(5_258_802));
        assert_eq!(parse_decimal(".5").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1.2.3", "abc", "1/0", "1e5", "."] {
            assert!(parse_decimal(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn infinity_orders_above_everything() {
        assert!(Price::Finite(int(1_000_000)) < Price::Infinite);
        assert_eq!(Price::Infinite, Price::Infinite);
        assert!(Price::Finite(ratio(1, 3)) < Price::Finite(ratio(1, 2)));
    }

    #[test]
    fn pair_round_trip() {
        let v = ratio(-41, 6);
        let (n, d) = to_pair(&v).unwrap();
        assert_eq!(from_pair(n, d).unwrap(), v);
    }
}

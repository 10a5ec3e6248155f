//! Exact text forms for doubled rank values and rationals.
//!
//! Rank sums live on the half-integer lattice; they are carried as doubled
//! integers and only turned into decimal strings ("6.5") at the edges.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Renders a doubled value as an exact decimal: `13 -> "6.5"`, `12 -> "6"`.
pub fn format_doubled(doubled: i64) -> String {
    let sign = if doubled < 0 { "-" } else { "" };
    let abs = doubled.unsigned_abs();
    if abs.is_multiple_of(2) {
        format!("{sign}{}", abs / 2)
    } else {
        format!("{sign}{}.5", abs / 2)
    }
}

/// Parses a decimal that must be a multiple of one half and returns it doubled.
pub fn parse_doubled(input: &str) -> Result<i64> {
    let value = parse_rational(input)?;
    let doubled = value * BigRational::from_integer(BigInt::from(2));
    if !doubled.is_integer() {
        return Err(parse_err(input, "not a multiple of 1/2"));
    }
    doubled
        .to_integer()
        .to_i64()
        .ok_or_else(|| parse_err(input, "out of range"))
}

/// Always `num/den` in lowest terms, e.g. `"1/1"`, `"-3/20"`.
pub fn format_rational(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Accepts `"num/den"`, an integer, or a finite decimal such as `"0.3"`,
/// `"-2.25"` or `".5"`. Decimals are read exactly.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(parse_err(input, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|e| parse_err(input, e.to_string()))?;
        let den = BigInt::from_str(den.trim()).map_err(|e| parse_err(input, e.to_string()))?;
        if den.is_zero() {
            return Err(parse_err(input, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }

    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(parse_err(input, "no digits"));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(parse_err(input, "expected digits, '.', or 'num/den'"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|e| parse_err(input, e.to_string()))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Nearest `f64`; the same rational always yields the same float.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Shortest decimal for a rational with a terminating expansion, otherwise
/// `None`. Used for display only.
pub fn exact_decimal(value: &BigRational) -> Option<String> {
    let mut den = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut places = 0usize;
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    places += twos.max(fives);
    let scaled = value * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let sign = if value.is_negative() { "-" } else { "" };
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (i, f) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{i}.{f}"))
}

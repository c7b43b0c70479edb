//! Exact rational helpers: literal parsing and decimal rendering.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid number literal `{0}`")]
pub struct NumberError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `0.3`, `.25`, `1`, `7/10` or `-2/4` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, NumberError> {
    let err = || NumberError(text.to_string());
    let t = text.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| err())?;
        let den: BigInt = d.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{whole}{frac}");
    let num: BigInt = digits.parse().map_err(|_| err())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(num, den);
    Ok(if negative { -value } else { value })
}

/// Renders `value` with at most `places` fractional digits, rounding half to
/// even, with trailing zeros trimmed (`3/10` -> `0.3`, `1/3` -> `0.333333`).
pub fn to_decimal(value: &Rational, places: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), places as usize);
    let scaled = value * Rational::from_integer(scale.clone());
    let rounded = round_half_even(&scaled);
    let negative = rounded.is_negative();
    let magnitude = rounded.abs();
    let whole = &magnitude / &scale;
    let frac = &magnitude % &scale;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if places > 0 && !frac.is_zero() {
        let digits = format!("{:0>width$}", frac.to_string(), width = places as usize);
        out.push('.');
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

fn round_half_even(value: &Rational) -> BigInt {
    let floor = value.floor();
    let diff = value - &floor;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let base = floor.to_integer();
    if diff > half || (diff == half && !(&base % 2u32).is_zero()) {
        base + 1
    } else {
        base
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
}

/// Closest dyadic rational `k / 2^bits` to `value`.
pub fn from_f64_dyadic(value: f64, bits: u32) -> Rational {
    let den = BigInt::one() << bits;
    let scaled = (value * f64::from(2u32).powi(bits as i32)).round();
    Rational::new(BigInt::from(scaled as i128), den)
}

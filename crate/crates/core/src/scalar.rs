//! Scalar abstraction shared by the numeric modules.
//!
//! Objectives that are rational functions of integer counts (modularity,
//! ring seriation, betweenness, association strength) are written once over
//! [`Scalar`] and instantiated with `f64` for speed or with [`Rational`] when
//! an exact answer is needed. The map layout needs square roots and is
//! written over [`num_traits::Float`] instead.

use std::fmt::{Debug, Display};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

/// Field-like scalar used by the exact-or-approximate objectives.
pub trait Scalar:
    NumAssign + Signed + Clone + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar")
    }

    /// Lossy view used only for rendering and logging.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest improvement a greedy search may accept; zero for exact types.
    fn improvement_floor() -> Self {
        Self::zero()
    }
}

impl Scalar for f32 {
    fn improvement_floor() -> Self {
        1e-6
    }
}

impl Scalar for f64 {
    fn improvement_floor() -> Self {
        1e-12
    }
}

impl Scalar for Rational {}

/// Exact rational from an integer count.
pub fn rational_from_count(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact ratio `num / den` of two counts. Panics on `den == 0`.
pub fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a plain decimal literal (`287.1`, `-5`, `0.015`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mantissa: BigInt = format!("{int_part}{frac_part}").parse().unwrap_or_else(|_| BigInt::zero());
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
    let value = Rational::new(mantissa, scale);
    Some(if negative { -value } else { value })
}

/// Rounds `value * 10^decimals` half away from zero and returns the scaled integer.
pub fn round_half_away(value: &Rational, decimals: u32) -> BigInt {
    let scaled = value * Rational::from_integer(BigInt::from(10u32).pow(decimals));
    let magnitude = scaled.abs();
    let (q, r) = magnitude.numer().div_rem(magnitude.denom());
    let twice_r: BigInt = r * 2;
    let rounded = if &twice_r >= magnitude.denom() { q + 1 } else { q };
    if scaled.is_negative() {
        -rounded
    } else {
        rounded
    }
}

/// Formats `value` with exactly `decimals` fractional digits, rounding half away from zero.
pub fn format_fixed(value: &Rational, decimals: u32) -> String {
    let scaled = round_half_away(value, decimals);
    let negative = scaled.sign() == Sign::Minus;
    let digits = scaled.magnitude().to_string();
    let body = if decimals == 0 {
        digits
    } else {
        let width = decimals as usize + 1;
        let padded = format!("{digits:0>width$}");
        let (i, f) = padded.split_at(padded.len() - decimals as usize);
        format!("{i}.{f}")
    };
    if negative && scaled != BigInt::zero() {
        format!("-{body}")
    } else {
        body
    }
}

/// Converts a finite float to the exact rational it denotes.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("287.1").unwrap(), ratio(2871, 10));
        assert_eq!(parse_decimal("-5").unwrap(), -rational_from_count(5));
        assert_eq!(parse_decimal(".5").unwrap(), ratio(1, 2));
        assert!(parse_decimal("1e3").is_none());
        assert!(parse_decimal("").is_none());
        assert!(parse_decimal("-").is_none());
        assert!(parse_decimal("1.2.3").is_none());
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(format_fixed(&ratio(1, 2), 0), "1");
        assert_eq!(format_fixed(&-ratio(1, 2), 0), "-1");
        assert_eq!(format_fixed(&ratio(1, 3), 0), "0");
        assert_eq!(format_fixed(&ratio(155, 100), 2), "1.55");
        assert_eq!(format_fixed(&ratio(1, 100), 2), "0.01");
        assert_eq!(format_fixed(&ratio(0, 7), 2), "0.00");
        assert_eq!(format_fixed(&ratio(1167800, 13271), 1), "88.0");
        assert_eq!(format_fixed(&-ratio(1, 1000), 2), "0.00");
    }
}

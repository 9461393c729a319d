//! Exact probability arithmetic.
//!
//! Every probability in the crate is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. Decimal input
//! such as `"0.45"` is converted exactly (`9/20`), never through `f64`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("empty probability literal")]
    Empty,
    #[error("malformed probability literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("probability `{0}` is outside [0, 1]")]
    OutOfRange(String),
}

/// Parses a non-negative rational written as `p/q`, an integer, or a
/// plain decimal (`0.25`, `.5`, `1.`). Scientific notation (`2.5e-3`) is
/// accepted because JSON number rendering may produce it.
pub fn parse_rational(text: &str) -> Result<Rational, RationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RationalError::Empty);
    }
    let malformed = || RationalError::Malformed(s.to_string());

    if let Some((num, den)) = s.split_once('/') {
        let num = parse_uint(num.trim()).ok_or_else(malformed)?;
        let den = parse_uint(den.trim()).ok_or_else(malformed)?;
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(BigInt::from(num), BigInt::from(den)));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| malformed())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = parse_uint(&digits).ok_or_else(malformed)?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(malformed());
    }
    let ten = BigUint::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(BigInt::from(numer * num_traits::pow(ten, scale as usize)))
    } else {
        Rational::new(
            BigInt::from(numer),
            BigInt::from(num_traits::pow(ten, (-scale) as usize)),
        )
    };
    Ok(value)
}

fn parse_uint(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

/// Parses a probability and checks `0 <= p <= 1`.
pub fn parse_probability(text: &str) -> Result<Rational, RationalError> {
    let p = parse_rational(text)?;
    if p > Rational::one() {
        return Err(RationalError::OutOfRange(text.trim().to_string()));
    }
    Ok(p)
}

/// `p/q` form; integers print without a denominator (`0`, `1`).
pub fn to_fraction_string(value: &Rational) -> String {
    value.to_string()
}

/// Exact decimal rendering when the expansion terminates, `None` otherwise.
pub fn to_exact_decimal(value: &Rational) -> Option<String> {
    let mut den = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
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
    let places = twos.max(fives);
    Some(decimal_digits(value, places))
}

/// Decimal rendering rounded half-up to `places` fractional digits.
pub fn to_decimal_string(value: &Rational, places: usize) -> String {
    if let Some(exact) = to_exact_decimal(value) {
        let frac_len = exact.split_once('.').map_or(0, |(_, f)| f.len());
        if frac_len <= places {
            return exact;
        }
    }
    decimal_digits(value, places)
}

fn decimal_digits(value: &Rational, places: usize) -> String {
    let negative = value.is_negative();
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = value.abs() * Rational::from_integer(scale);
    let rounded = (scaled + Rational::new(BigInt::one(), BigInt::from(2))).floor();
    let digits = rounded.to_integer().to_string();
    let mut out = String::new();
    if negative && !rounded.is_zero() {
        out.push('-');
    }
    if places == 0 {
        out.push_str(&digits);
        return out;
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    out.push_str(int_part);
    out.push('.');
    out.push_str(frac_part);
    out
}

/// Natural logarithm of a positive rational, robust to magnitudes that
/// would underflow an `f64` (products of many small probabilities).
pub fn ln(value: &Rational) -> f64 {
    debug_assert!(value.is_positive());
    ln_biguint(value.numer()) - ln_biguint(value.denom())
}

fn ln_biguint(n: &BigInt) -> f64 {
    let (sign, mag) = (n.sign(), n.magnitude());
    debug_assert_ne!(sign, Sign::Minus);
    let bits = mag.bits();
    if bits <= 1000 {
        return mag.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (mag >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Convenience constructor used throughout the tests and examples.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

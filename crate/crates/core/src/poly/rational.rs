//! Helpers around [`BigRational`] used throughout the crate.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest `f64`. Values outside the `f64` range saturate to infinity.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rational::zero());
    }
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mut mantissa, mut exp) = if biased == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1u64 << 52), biased - 1075)
    };
    let tz = mantissa.trailing_zeros() as i64;
    mantissa >>= tz;
    exp += tz;
    let mut m = BigInt::from(mantissa);
    if negative {
        m = -m;
    }
    Some(if exp >= 0 {
        Rational::from_integer(m << exp as usize)
    } else {
        Rational::new_raw(m, BigInt::one() << (-exp) as usize)
    })
}

/// Parses `a`, `-a`, `a/b` or a plain decimal such as `-0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, PolyError> {
    let s = text.trim();
    let bad = || PolyError::Syntax {
        pos: 0,
        msg: format!("invalid rational literal `{text}`"),
    };
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(PolyError::DivisionByZero { pos: 0 });
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !digits.chars().all(|c| c.is_ascii_digit())
            || (digits.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let mantissa = BigInt::from_str(&format!("{digits}{frac}")).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(mantissa, scale);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

/// Exact square root when both numerator and denominator are perfect squares.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// `a/b` or `a` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Midpoint of two rationals.
pub(crate) fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

pub(crate) fn abs(r: &Rational) -> Rational {
    r.abs()
}

//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All algorithms are written against [`Scalar`], so the same code runs with
//! `f64`/`f32` for quick experiments and with [`Rational`] when results must be
//! exact (the distance tables are exact decimals).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub use crate::rational::Rational;

/// Numeric type usable by the monitor, the box algebra and the MILP solver.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Parses a decimal literal (`0.44`, `-3`, `.5`, `1.5e-2`).
    fn parse_decimal(text: &str) -> Option<Self>;

    /// Renders the value as decimal text that [`Scalar::parse_decimal`] reads back.
    fn to_decimal_string(&self) -> String;

    /// Absolute tolerance used for sign and equality tests. Zero for exact types.
    fn tolerance() -> Self;

    fn is_exact() -> bool {
        false
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits") / Self::from_i64(den).expect("integer fits")
    }

    /// `self -= a * b`.
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self = self.clone() - a.clone() * b.clone();
    }
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn parse_decimal(text: &str) -> Option<Self> {
                let trimmed = text.trim();
                if !is_decimal_literal(trimmed) {
                    return None;
                }
                trimmed.parse().ok()
            }

            fn to_decimal_string(&self) -> String {
                format!("{}", self)
            }

            fn tolerance() -> Self {
                $tol
            }
        }
    };
}

impl_float_scalar!(f64, 1e-9);
impl_float_scalar!(f32, 1e-5);

impl Scalar for Rational {
    fn parse_decimal(text: &str) -> Option<Self> {
        parse_rational_decimal(text.trim())
    }

    fn to_decimal_string(&self) -> String {
        rational_to_decimal(self)
    }

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn is_exact() -> bool {
        true
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::from_ratio(num, den)
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        self.sub_mul_assign(a, b);
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            let big = self.to_big();
            big.numer().to_f64().unwrap_or(f64::NAN) / big.denom().to_f64().unwrap_or(f64::NAN)
        })
    }
}

/// `a < b` beyond tolerance.
pub fn lt<S: Scalar>(a: &S, b: &S) -> bool {
    a.clone() + S::tolerance() < *b
}

/// `a == b` within tolerance.
pub fn approx_eq<S: Scalar>(a: &S, b: &S) -> bool {
    (a.clone() - b.clone()).abs() <= S::tolerance()
}

pub fn smax<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

pub fn smin<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

/// Converts between scalar types via their decimal rendering.
pub fn convert<A: Scalar, B: Scalar>(value: &A) -> B {
    B::parse_decimal(&value.to_decimal_string())
        .or_else(|| B::from_f64(value.to_f64_lossy()))
        .expect("finite scalar")
}

fn is_decimal_literal(text: &str) -> bool {
    let body = text.strip_prefix(['-', '+']).unwrap_or(text);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    let digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    let mantissa_ok = digits(int)
        && frac.map_or(true, digits)
        && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    let exponent_ok = exponent.map_or(true, |e| {
        let e = e.strip_prefix(['-', '+']).unwrap_or(e);
        !e.is_empty() && digits(e)
    });
    mantissa_ok && exponent_ok
}

fn parse_rational_decimal(text: &str) -> Option<Rational> {
    if !is_decimal_literal(text) {
        return None;
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(Rational::from_big(if negative { -value } else { value }))
}

/// Exact decimal when the denominator is of the form 2^a 5^b; otherwise
/// 30 fractional digits (the caller loses exactness, which is rare in
/// practice since all inputs are decimal literals).
fn rational_to_decimal(value: &Rational) -> String {
    let negative = value.is_negative();
    let magnitude = value.abs().to_big();
    let mut den = magnitude.denom().clone();
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    let places = if den.is_one() { twos.max(fives) } else { 30 };
    let scaled = magnitude * BigRational::from_integer(num_traits::pow(BigInt::from(10u8), places));
    let digits = scaled.round().to_integer().to_string();
    let text = if places == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = places + 1);
        let (int, frac) = padded.split_at(padded.len() - places);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    };
    if negative && text != "0" {
        format!("-{text}")
    } else {
        text
    }
}

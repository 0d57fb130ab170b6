//! Exact rational with an inline 64-bit representation.
//!
//! Values whose reduced numerator and denominator fit in `i64` are kept
//! inline and combined through `i128` intermediates; anything larger falls
//! back to [`BigRational`]. The representation is canonical (a value is
//! `Big` only when it does not fit inline), so equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    /// Reduced, positive denominator, numerator never `i64::MIN`.
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_wide(Ratio::new(num as i128, den as i128))
    }

    pub fn from_integer(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    pub fn from_big(value: BigRational) -> Self {
        match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(value)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    fn small(&self) -> Option<(i128, i128)> {
        match self.0 {
            Repr::Small(n, d) => Some((n as i128, d as i128)),
            Repr::Big(_) => None,
        }
    }

    /// Reduces `n / d` (`d > 0`); `None` when it does not fit inline.
    fn from_parts(n: i128, d: i128) -> Option<Self> {
        if n == 0 {
            return Some(Self::zero());
        }
        let (mut un, mut ud) = (n.unsigned_abs(), d as u128);
        if ud != 1 {
            // 64-bit division is much cheaper than 128-bit.
            if un <= u64::MAX as u128 && ud <= u64::MAX as u128 {
                let g = (un as u64).gcd(&(ud as u64));
                if g != 1 {
                    un = (un as u64 / g) as u128;
                    ud = (ud as u64 / g) as u128;
                }
            } else {
                let g = un.gcd(&ud);
                if g != 1 {
                    un /= g;
                    ud /= g;
                }
            }
        }
        if un > i64::MAX as u128 || ud > i64::MAX as u128 {
            return None;
        }
        let n = if n < 0 { -(un as i64) } else { un as i64 };
        Some(Rational(Repr::Small(n, ud as i64)))
    }

    fn from_wide(w: Ratio<i128>) -> Self {
        Self::from_parts(*w.numer(), *w.denom()).unwrap_or_else(|| {
            Rational(Repr::Big(BigRational::new_raw(BigInt::from(*w.numer()), BigInt::from(*w.denom()))))
        })
    }

    fn combine(
        &self,
        rhs: &Self,
        fast: impl FnOnce((i128, i128), (i128, i128)) -> Option<Self>,
        slow: impl FnOnce(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Some(a), Some(b)) = (self.small(), rhs.small()) {
            if let Some(r) = fast(a, b) {
                return r;
            }
        }
        Self::from_big(slow(self.to_big(), rhs.to_big()))
    }

    /// `self -= a * b` without allocation when everything fits inline.
    pub fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if let (Some((sn, sd)), Some((an, ad)), Some((bn, bd))) = (self.small(), a.small(), b.small()) {
            let product = Self::from_parts(an * bn, ad * bd).and_then(|p| p.small());
            let fast = product.and_then(|(pn, pd)| {
                if sd == pd {
                    Self::from_parts(sn - pn, sd)
                } else {
                    let n = sn.checked_mul(pd)?.checked_sub(pn.checked_mul(sd)?)?;
                    Self::from_parts(n, sd.checked_mul(pd)?)
                }
            });
            if let Some(r) = fast {
                *self = r;
                return;
            }
        }
        *self = Self::from_big(self.to_big() - a.to_big() * b.to_big());
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => (0u8, n, d).hash(state),
            Repr::Big(b) => (1u8, b).hash(state),
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $fast:expr) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                self.combine(rhs, $fast, |a, b| a.$method(b))
            }
        }
    };
}

// Inline operands are below 2^63 in magnitude, so these products and sums fit in i128.
binop!(Add, add, |(an, ad), (bn, bd)| if ad == bd {
    Rational::from_parts(an + bn, ad)
} else {
    Rational::from_parts(an * bd + bn * ad, ad * bd)
});
binop!(Sub, sub, |(an, ad), (bn, bd)| if ad == bd {
    Rational::from_parts(an - bn, ad)
} else {
    Rational::from_parts(an * bd - bn * ad, ad * bd)
});
binop!(Mul, mul, |(an, ad), (bn, bd)| Rational::from_parts(an * bn, ad * bd));

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        (&self).div(&rhs)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        self.combine(
            rhs,
            |(an, ad), (bn, bd)| {
                let (n, d) = (an * bd, ad * bn);
                if d < 0 {
                    Rational::from_parts(-n, -d)
                } else {
                    Rational::from_parts(n, d)
                }
            },
            |a, b| a / b,
        )
    }
}

impl Rem for Rational {
    type Output = Rational;
    fn rem(self, rhs: Rational) -> Rational {
        Self::from_big(self.to_big() % rhs.to_big())
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, d)),
            Repr::Big(b) => Self::from_big(-b),
        }
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }
}

impl Num for Rational {
    type FromStrRadixErr = <BigRational as Num>::FromStrRadixErr;

    fn from_str_radix(text: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(text, radix).map(Self::from_big)
    }
}

impl FromStr for Rational {
    type Err = <BigRational as Num>::FromStrRadixErr;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        Self::from_str_radix(text, 10)
    }
}

impl Signed for Rational {
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Self::zero()
        } else {
            self - other
        }
    }

    fn signum(&self) -> Self {
        match self.cmp(&Self::zero()) {
            Ordering::Less => -Self::one(),
            Ordering::Equal => Self::zero(),
            Ordering::Greater => Self::one(),
        }
    }

    fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }
}

impl FromPrimitive for Rational {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_big(BigRational::from_integer(BigInt::from(n))))
    }

    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::from_big(BigRational::from_integer(BigInt::from(n))))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_big)
    }
}

impl ToPrimitive for Rational {
    fn to_i64(&self) -> Option<i64> {
        self.to_big().to_integer().to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_big().to_integer().to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        match &self.0 {
            Repr::Small(n, d) => Some(*n as f64 / *d as f64),
            Repr::Big(b) => b.to_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let huge = Rational::from_integer(i64::MAX);
        let sq = &huge * &huge;
        assert!(matches!(sq.0, Repr::Big(_)));
        let back = &sq / &huge;
        assert_eq!(back, huge);
        assert!(matches!(back.0, Repr::Small(..)));
        assert_eq!(-Rational::from_big(big(i64::MIN, 1)), Rational::from_big(-big(i64::MIN, 1)));
    }

    #[test]
    fn display_matches_big_rational() {
        assert_eq!(Rational::from_ratio(6, -4).to_string(), "-3/2");
        assert_eq!(Rational::from_ratio(4, 2).to_string(), "2");
    }

    proptest! {
        #[test]
        fn agrees_with_big_rational(
            a in any::<i64>(), b in 1i64..i64::MAX, c in any::<i64>(), d in 1i64..i64::MAX,
        ) {
            let (x, y) = (Rational::from_ratio(a, b), Rational::from_ratio(c, d));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            let mut z = x.clone();
            z.sub_mul_assign(&y, &x);
            prop_assert_eq!(z.to_big(), &bx - &by * &bx);
            prop_assert_eq!(Rational::from_big(x.to_big()), x);
        }
    }
}

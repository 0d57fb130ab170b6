//! Quantitative semantics (robustness degree) over discrete time.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::scalar::Scalar;
use crate::trace::Trace;

/// Robustness value. `T` evaluates to `+∞` and its negation to `-∞`.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub enum Robustness<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> Robustness<S> {
    /// `ρ >= 0`; zero counts as satisfaction.
    pub fn satisfied(&self) -> bool {
        match self {
            Robustness::NegInf => false,
            Robustness::Finite(v) => !v.is_negative(),
            Robustness::PosInf => true,
        }
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Robustness::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Robustness::NegInf => Robustness::PosInf,
            Robustness::Finite(v) => Robustness::Finite(-v),
            Robustness::PosInf => Robustness::NegInf,
        }
    }

    /// Adds a constant; infinities absorb it.
    pub fn shift(self, by: &S) -> Self {
        match self {
            Robustness::Finite(v) => Robustness::Finite(v + by.clone()),
            other => other,
        }
    }

    pub fn abs(self) -> Self {
        match self {
            Robustness::Finite(v) => Robustness::Finite(v.abs()),
            _ => Robustness::PosInf,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other.partial_cmp(&self) == Some(Ordering::Less) {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other.partial_cmp(&self) == Some(Ordering::Greater) {
            other
        } else {
            self
        }
    }
}

impl<S: Scalar> fmt::Display for Robustness<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Robustness::NegInf => f.write_str("-inf"),
            Robustness::Finite(v) => f.write_str(&v.to_decimal_string()),
            Robustness::PosInf => f.write_str("inf"),
        }
    }
}

/// `ρ(s, f, t)`; the trace must cover `t + horizon(f)`.
pub fn robustness<S: Scalar>(s: &Trace<S>, f: &Formula<S>, t: usize) -> Result<Robustness<S>> {
    let required = t + f.horizon();
    if required > s.last_time() {
        return Err(Error::TraceTooShort { required, available: s.last_time() });
    }
    if let Some(dim) = f.max_dim() {
        if dim >= s.dims() {
            return Err(Error::DimensionOutOfRange { index: dim + 1, dims: s.dims() });
        }
    }
    Ok(eval(s, f, t))
}

pub fn satisfies<S: Scalar>(s: &Trace<S>, f: &Formula<S>) -> Result<bool> {
    robustness(s, f, 0).map(|r| r.satisfied())
}

fn eval<S: Scalar>(s: &Trace<S>, f: &Formula<S>, t: usize) -> Robustness<S> {
    match f {
        Formula::True => Robustness::PosInf,
        Formula::False => Robustness::NegInf,
        Formula::Pred(p) => Robustness::Finite(p.margin(s.value(t, p.dim))),
        Formula::Not(inner) => eval(s, inner, t).negate(),
        Formula::And(a, b) => eval(s, a, t).min(eval(s, b, t)),
        Formula::Or(a, b) => eval(s, a, t).max(eval(s, b, t)),
        Formula::Eventually(i, inner) => {
            i.steps().map(|k| eval(s, inner, t + k)).reduce(Robustness::max).expect("nonempty interval")
        }
        Formula::Globally(i, inner) => {
            i.steps().map(|k| eval(s, inner, t + k)).reduce(Robustness::min).expect("nonempty interval")
        }
        Formula::Until(a, i, b) => {
            let mut prefix = Robustness::PosInf;
            let mut best = Robustness::NegInf;
            for k in 0..=i.hi {
                prefix = prefix.min(eval(s, a, t + k));
                if k >= i.lo {
                    best = best.max(eval(s, b, t + k).min(prefix.clone()));
                }
            }
            best
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::scalar::Rational;

    fn q(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    fn f(text: &str) -> Formula<Rational> {
        parse_formula(text, 1).unwrap()
    }

    fn s1() -> Trace<Rational> {
        Trace::scalar(vec![q("0.3"); 21]).unwrap()
    }

    fn s2() -> Trace<Rational> {
        Trace::scalar((0..=20).map(|t| Rational::from_ratio(t, 20))).unwrap()
    }

    const PHI1: &str = "G[0,20](x1 >= 0.2 & x1 <= 0.4)";
    const PHI3: &str = "F[0,20](x1 >= 0.2 & x1 <= 0.4)";

    #[test]
    fn worked_example_values() {
        assert_eq!(robustness(&s1(), &f(PHI1), 0).unwrap(), Robustness::Finite(q("0.1")));
        assert_eq!(robustness(&s2(), &f(PHI1), 0).unwrap(), Robustness::Finite(q("-0.6")));
        assert_eq!(robustness(&s2(), &f(PHI3), 0).unwrap(), Robustness::Finite(q("0.1")));
    }

    #[test]
    fn truth_is_infinite() {
        assert_eq!(robustness(&s1(), &Formula::True, 0).unwrap(), Robustness::PosInf);
        assert_eq!(robustness(&s1(), &f("!T"), 0).unwrap(), Robustness::NegInf);
        assert_eq!(robustness(&s1(), &f("T & x1 <= 1"), 0).unwrap(), Robustness::Finite(q("0.7")));
        assert!(robustness(&s1(), &f("x1 <= 0.3"), 0).unwrap().satisfied());
    }

    #[test]
    fn short_trace_is_an_error() {
        let short = Trace::scalar(vec![q("0.3"); 5]).unwrap();
        assert!(matches!(
            robustness(&short, &f(PHI1), 0),
            Err(Error::TraceTooShort { required: 20, available: 4 })
        ));
        assert!(matches!(robustness(&s1(), &f(PHI1), 1), Err(Error::TraceTooShort { .. })));
    }

    #[test]
    fn until_matches_definition() {
        // x1 stays >= 0.1 until it reaches 0.5, within [2,4].
        let phi = f("x1 >= 0.1 U[2,4] x1 >= 0.5");
        let trace = Trace::scalar([q("0.2"), q("0.3"), q("0.4"), q("0.6"), q("0.05")]).unwrap();
        assert_eq!(robustness(&trace, &phi, 0).unwrap(), Robustness::Finite(q("0.1")));
        let eventually_as_until = f("T U[0,20] (x1 >= 0.2 & x1 <= 0.4)");
        assert_eq!(robustness(&s2(), &eventually_as_until, 0).unwrap(), Robustness::Finite(q("0.1")));
    }
}

//! Abstract syntax of discrete-time Signal Temporal Logic.

use std::fmt;

use crate::scalar::Scalar;

/// Closed discrete time window `{lo, lo + 1, ..., hi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn steps(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Le,
    Ge,
}

impl Cmp {
    pub fn flip(self) -> Cmp {
        match self {
            Cmp::Le => Cmp::Ge,
            Cmp::Ge => Cmp::Le,
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
        })
    }
}

/// Rectangular predicate `x^dim <= threshold` or `x^dim >= threshold`.
///
/// `dim` is zero-based; the text form `x1` refers to `dim == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate<S> {
    pub dim: usize,
    pub cmp: Cmp,
    pub threshold: S,
}

impl<S: Scalar> Predicate<S> {
    pub fn new(dim: usize, cmp: Cmp, threshold: S) -> Self {
        Predicate { dim, cmp, threshold }
    }

    pub fn negated(&self) -> Self {
        Predicate { dim: self.dim, cmp: self.cmp.flip(), threshold: self.threshold.clone() }
    }

    /// Signed margin of `value` with respect to the predicate.
    pub fn margin(&self, value: &S) -> S {
        match self.cmp {
            Cmp::Le => self.threshold.clone() - value.clone(),
            Cmp::Ge => value.clone() - self.threshold.clone(),
        }
    }
}

impl<S: Scalar> fmt::Display for Predicate<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{} {} {}", self.dim + 1, self.cmp, self.threshold.to_decimal_string())
    }
}

/// STL formula over bounded discrete time.
///
/// `False` never comes out of the parser; it appears when negation normal form
/// pushes a negation onto `True`.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula<S> {
    True,
    False,
    Pred(Predicate<S>),
    Not(Box<Formula<S>>),
    And(Box<Formula<S>>, Box<Formula<S>>),
    Or(Box<Formula<S>>, Box<Formula<S>>),
    Until(Box<Formula<S>>, Interval, Box<Formula<S>>),
    Eventually(Interval, Box<Formula<S>>),
    Globally(Interval, Box<Formula<S>>),
}

impl<S: Scalar> Formula<S> {
    pub fn pred(dim: usize, cmp: Cmp, threshold: S) -> Self {
        Formula::Pred(Predicate::new(dim, cmp, threshold))
    }

    pub fn not(inner: Self) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn and(lhs: Self, rhs: Self) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Self, rhs: Self) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn until(lhs: Self, interval: Interval, rhs: Self) -> Self {
        Formula::Until(Box::new(lhs), interval, Box::new(rhs))
    }

    pub fn eventually(interval: Interval, inner: Self) -> Self {
        Formula::Eventually(interval, Box::new(inner))
    }

    pub fn globally(interval: Interval, inner: Self) -> Self {
        Formula::Globally(interval, Box::new(inner))
    }

    /// Left-nested conjunction; `True` for an empty list.
    pub fn and_all(parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` for an empty list.
    pub fn or_all(parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// Minimum number of steps after `t` needed to evaluate the formula at `t`.
    pub fn horizon(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Pred(_) => 0,
            Formula::Not(inner) => inner.horizon(),
            Formula::And(a, b) | Formula::Or(a, b) => a.horizon().max(b.horizon()),
            Formula::Until(a, i, b) => i.hi + a.horizon().max(b.horizon()),
            Formula::Eventually(i, inner) | Formula::Globally(i, inner) => i.hi + inner.horizon(),
        }
    }

    pub fn contains_negation(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Pred(_) => false,
            Formula::Not(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, _, b) => {
                a.contains_negation() || b.contains_negation()
            }
            Formula::Eventually(_, inner) | Formula::Globally(_, inner) => inner.contains_negation(),
        }
    }

    pub fn contains_until(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Pred(_) => false,
            Formula::Until(..) => true,
            Formula::Not(inner) | Formula::Eventually(_, inner) | Formula::Globally(_, inner) => {
                inner.contains_until()
            }
            Formula::And(a, b) | Formula::Or(a, b) => a.contains_until() || b.contains_until(),
        }
    }

    /// Largest zero-based predicate dimension, if any predicate occurs.
    pub fn max_dim(&self) -> Option<usize> {
        let mut best = None;
        self.visit_predicates(&mut |p| best = Some(best.map_or(p.dim, |b: usize| b.max(p.dim))));
        best
    }

    pub fn visit_predicates(&self, visit: &mut impl FnMut(&Predicate<S>)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(p) => visit(p),
            Formula::Not(inner) | Formula::Eventually(_, inner) | Formula::Globally(_, inner) => {
                inner.visit_predicates(visit)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, _, b) => {
                a.visit_predicates(visit);
                b.visit_predicates(visit);
            }
        }
    }

    /// Rebuilds the formula with every predicate replaced by `map(predicate)`.
    pub fn map_predicates<T: Scalar>(&self, map: &impl Fn(&Predicate<S>) -> Predicate<T>) -> Formula<T> {
        let rec = |f: &Formula<S>| Box::new(f.map_predicates(map));
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Pred(p) => Formula::Pred(map(p)),
            Formula::Not(inner) => Formula::Not(rec(inner)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::Until(a, i, b) => Formula::Until(rec(a), *i, rec(b)),
            Formula::Eventually(i, inner) => Formula::Eventually(*i, rec(inner)),
            Formula::Globally(i, inner) => Formula::Globally(*i, rec(inner)),
        }
    }

    /// Multiplies every interval bound by `factor`.
    pub fn scale_time(&self, factor: usize) -> Formula<S> {
        let scale = |i: &Interval| Interval { lo: i.lo * factor, hi: i.hi * factor };
        let rec = |f: &Formula<S>| Box::new(f.scale_time(factor));
        match self {
            Formula::True | Formula::False | Formula::Pred(_) => self.clone(),
            Formula::Not(inner) => Formula::Not(rec(inner)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::Until(a, i, b) => Formula::Until(rec(a), scale(i), rec(b)),
            Formula::Eventually(i, inner) => Formula::Eventually(scale(i), rec(inner)),
            Formula::Globally(i, inner) => Formula::Globally(scale(i), rec(inner)),
        }
    }

    /// Every subformula including `self`, parents before children.
    pub fn subformulae(&self) -> Vec<&Formula<S>> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            match out[i] {
                Formula::True | Formula::False | Formula::Pred(_) => {}
                Formula::Not(inner) | Formula::Eventually(_, inner) | Formula::Globally(_, inner) => {
                    out.push(inner)
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, _, b) => {
                    out.push(a);
                    out.push(b);
                }
            }
            i += 1;
        }
        out
    }
}

/// Binary nodes are always parenthesized so the output parses back to the same tree.
impl<S: Scalar> fmt::Display for Formula<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("T"),
            Formula::False => f.write_str("F"),
            Formula::Pred(p) => write!(f, "{p}"),
            Formula::Not(inner) => write!(f, "!{}", Operand(inner)),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Until(a, i, b) => write!(f, "({a} U{i} {b})"),
            Formula::Eventually(i, inner) => write!(f, "F{i} {}", Operand(inner)),
            Formula::Globally(i, inner) => write!(f, "G{i} {}", Operand(inner)),
        }
    }
}

/// Wraps predicates in parentheses when they are the operand of a prefix operator.
struct Operand<'a, S>(&'a Formula<S>);

impl<S: Scalar> fmt::Display for Operand<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::Pred(p) => write!(f, "({p})"),
            other => write!(f, "{other}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    fn theta(upper: &str) -> Formula<Rational> {
        Formula::and(Formula::pred(0, Cmp::Ge, q("0.2")), Formula::pred(0, Cmp::Le, q(upper)))
    }

    #[test]
    fn horizon_of_example_suite() {
        let i = |a, b| Interval::new(a, b).unwrap();
        let suite = [
            Formula::globally(i(0, 20), theta("0.4")),
            Formula::globally(i(0, 20), theta("0.44")),
            Formula::eventually(i(0, 20), theta("0.4")),
            Formula::and(
                Formula::globally(i(0, 20), theta("0.4")),
                Formula::eventually(i(0, 20), theta("0.44")),
            ),
            Formula::and(
                Formula::globally(i(0, 10), theta("0.4")),
                Formula::globally(i(12, 20), theta("0.44")),
            ),
            Formula::globally(i(0, 16), Formula::eventually(i(0, 4), theta("0.4"))),
        ];
        for f in &suite {
            assert_eq!(f.horizon(), 20, "{f}");
        }
        assert_eq!(Formula::pred(0, Cmp::Le, q("0.5")).horizon(), 0);
        let until = Formula::until(theta("0.4"), i(2, 5), suite[0].clone());
        assert_eq!(until.horizon(), 25);
    }

    #[test]
    fn display_parenthesizes_binary_nodes() {
        let f = Formula::globally(Interval::new(0, 20).unwrap(), theta("0.4"));
        assert_eq!(f.to_string(), "G[0,20] (x1 >= 0.2 & x1 <= 0.4)");
        let g = Formula::not(Formula::pred(1, Cmp::Le, q("-1.5")));
        assert_eq!(g.to_string(), "!(x2 <= -1.5)");
    }

    #[test]
    fn interval_rejects_reversed_bounds() {
        assert!(Interval::new(3, 2).is_none());
        assert_eq!(Interval::new(2, 2).unwrap().steps().count(), 1);
    }
}

//! Structural rewrites: negation normal form and ε-relaxation.

use crate::error::{Error, Result};
use crate::formula::{Formula, Interval, Predicate};
use crate::scalar::Scalar;

/// Pushes every negation down to the predicates and removes it by flipping
/// the comparison.
///
/// A negated until is first unrolled over its (finite) interval,
/// `a U[l,h] b == OR_{k=l..h} (G[k,k] b & G[0,k] a)`, and then dualized.
/// The unrolling has the same robustness as the until, so the result keeps
/// robustness exactly.
pub fn to_nnf<S: Scalar>(f: &Formula<S>) -> Formula<S> {
    nnf(f, false)
}

/// `to_nnf(!f)`.
pub fn negate<S: Scalar>(f: &Formula<S>) -> Formula<S> {
    nnf(f, true)
}

fn nnf<S: Scalar>(f: &Formula<S>, negated: bool) -> Formula<S> {
    match (f, negated) {
        (Formula::True, false) | (Formula::False, true) => Formula::True,
        (Formula::True, true) | (Formula::False, false) => Formula::False,
        (Formula::Pred(p), false) => Formula::Pred(p.clone()),
        (Formula::Pred(p), true) => Formula::Pred(p.negated()),
        (Formula::Not(inner), _) => nnf(inner, !negated),
        (Formula::And(a, b), false) => Formula::and(nnf(a, false), nnf(b, false)),
        (Formula::And(a, b), true) => Formula::or(nnf(a, true), nnf(b, true)),
        (Formula::Or(a, b), false) => Formula::or(nnf(a, false), nnf(b, false)),
        (Formula::Or(a, b), true) => Formula::and(nnf(a, true), nnf(b, true)),
        (Formula::Eventually(i, inner), false) => Formula::eventually(*i, nnf(inner, false)),
        (Formula::Eventually(i, inner), true) => Formula::globally(*i, nnf(inner, true)),
        (Formula::Globally(i, inner), false) => Formula::globally(*i, nnf(inner, false)),
        (Formula::Globally(i, inner), true) => Formula::eventually(*i, nnf(inner, true)),
        (Formula::Until(a, i, b), false) => Formula::until(nnf(a, false), *i, nnf(b, false)),
        (Formula::Until(a, i, b), true) => nnf(&unroll_until(a, *i, b), true),
    }
}

/// `OR_{k=lo..hi} (G[k,k] rhs & G[0,k] lhs)`.
pub fn unroll_until<S: Scalar>(lhs: &Formula<S>, interval: Interval, rhs: &Formula<S>) -> Formula<S> {
    Formula::or_all(interval.steps().map(|k| {
        Formula::and(
            Formula::globally(Interval { lo: k, hi: k }, rhs.clone()),
            Formula::globally(Interval { lo: 0, hi: k }, lhs.clone()),
        )
    }))
}

/// `f` evaluated `k` steps later, pushing the shift into temporal bounds
/// where possible.
pub fn delay<S: Scalar>(f: &Formula<S>, k: usize) -> Formula<S> {
    let shift = |i: &Interval| Interval { lo: i.lo + k, hi: i.hi + k };
    match f {
        _ if k == 0 => f.clone(),
        Formula::True | Formula::False => f.clone(),
        Formula::And(a, b) => Formula::and(delay(a, k), delay(b, k)),
        Formula::Or(a, b) => Formula::or(delay(a, k), delay(b, k)),
        Formula::Eventually(i, g) => Formula::eventually(shift(i), (**g).clone()),
        Formula::Globally(i, g) => Formula::globally(shift(i), (**g).clone()),
        Formula::Pred(_) | Formula::Not(_) | Formula::Until(..) => {
            Formula::globally(Interval { lo: k, hi: k }, f.clone())
        }
    }
}

/// Splits an NNF formula into at most `limit` formulae whose languages
/// union to the language of `f`.
///
/// Disjunctions, eventually and until branch; conjunctions and globally
/// distribute over the branches of their operands while the product stays
/// within the limit. Anything that would exceed it is kept whole.
pub fn disjuncts<S: Scalar>(f: &Formula<S>, limit: usize) -> Vec<Formula<S>> {
    let limit = limit.max(1);
    let branch = |parts: Vec<Formula<S>>| -> Vec<Formula<S>> {
        if parts.len() > limit {
            return vec![f.clone()];
        }
        let share = limit / parts.len();
        parts.iter().flat_map(|p| disjuncts(p, share)).collect()
    };
    match f {
        Formula::Or(a, b) => branch(vec![(**a).clone(), (**b).clone()]),
        Formula::Eventually(i, g) => branch(i.steps().map(|k| delay(g, k)).collect()),
        Formula::Until(a, i, b) => branch(i.steps().map(|k| Formula::and(delay(b, k), Formula::globally(Interval { lo: 0, hi: k }, (**a).clone()))).collect()),
        Formula::And(a, b) => distribute(&[(**a).clone(), (**b).clone()], limit).unwrap_or_else(|| vec![f.clone()]),
        Formula::Globally(i, g) if !matches!(**g, Formula::Pred(_) | Formula::True | Formula::False) => {
            let parts: Vec<_> = i.steps().map(|k| delay(g, k)).collect();
            distribute(&parts, limit).unwrap_or_else(|| vec![f.clone()])
        }
        _ => vec![f.clone()],
    }
}

/// Conjunction of `parts` as a union of conjunctions of their pieces, or
/// `None` if that would take more than `limit` pieces. Parts are split fully
/// or not at all: a partial split repeats the unsplit remainder in every
/// piece.
fn distribute<S: Scalar>(parts: &[Formula<S>], limit: usize) -> Option<Vec<Formula<S>>> {
    let mut acc: Vec<Formula<S>> = vec![Formula::True];
    for part in parts {
        let pieces = disjuncts(part, limit);
        if acc.len() * pieces.len() > limit {
            return None;
        }
        acc = acc
            .iter()
            .flat_map(|a| {
                pieces.iter().map(move |p| match a {
                    Formula::True => p.clone(),
                    _ => Formula::and(a.clone(), p.clone()),
                })
            })
            .collect();
    }
    Some(acc)
}

/// Loosens every threshold by `eps`: `x >= mu` becomes `x >= mu - eps` and
/// `x <= mu` becomes `x <= mu + eps`.
pub fn relax<S: Scalar>(f: &Formula<S>, eps: &S) -> Result<Formula<S>> {
    if f.contains_negation() {
        return Err(Error::NegationPresent);
    }
    Ok(f.map_predicates(&|p: &Predicate<S>| {
        let threshold = match p.cmp {
            crate::formula::Cmp::Le => p.threshold.clone() + eps.clone(),
            crate::formula::Cmp::Ge => p.threshold.clone() - eps.clone(),
        };
        Predicate::new(p.dim, p.cmp, threshold)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::robustness::robustness;
    use crate::scalar::Rational;
    use crate::trace::Trace;

    fn f(text: &str) -> Formula<Rational> {
        parse_formula(text, 1).unwrap()
    }

    fn q(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    #[test]
    fn flips_predicates_and_dualizes() {
        assert_eq!(to_nnf(&f("!(x1 <= 0.4)")), f("x1 >= 0.4"));
        let phi1 = f("G[0,20](x1 >= 0.2 & x1 <= 0.4)");
        assert_eq!(to_nnf(&Formula::not(Formula::not(phi1.clone()))), phi1);
        assert_eq!(to_nnf(&f("!G[0,2] x1 <= 0.5")), f("F[0,2] x1 >= 0.5"));
        assert_eq!(to_nnf(&f("!(T | F[1,2] x1 >= 1)")), f("F & G[1,2] x1 <= 1"));
        assert!(!to_nnf(&f("!(x1 >= 0.1 U[0,3] !x1 >= 0.7)")).contains_negation());
    }

    #[test]
    fn negated_until_keeps_robustness() {
        let phi = f("!(x1 >= 0.3 U[1,3] x1 >= 0.6)");
        let nnf = to_nnf(&phi);
        let values = ["0.4", "0.35", "0.5", "0.7", "0.2", "0.9"];
        for shift in 0..values.len() {
            let trace = Trace::scalar((0..6).map(|t| q(values[(t + shift) % values.len()]))).unwrap();
            assert_eq!(robustness(&trace, &phi, 0).unwrap(), robustness(&trace, &nnf, 0).unwrap());
        }
    }

    #[test]
    fn delay_and_disjuncts_preserve_robustness() {
        let phi = f("G[0,4] F[0,2](x1 >= 0.3 & x1 <= 0.6) & (x1 >= 0.1 U[1,3] x1 >= 0.5)");
        let values = ["0.4", "0.35", "0.5", "0.7", "0.2", "0.9", "0.1", "0.45"];
        for limit in [1, 4, 16, 1000] {
            let pieces = disjuncts(&to_nnf(&phi), limit);
            assert!(pieces.len() <= limit);
            for shift in 0..values.len() {
                let trace = Trace::scalar((0..8).map(|t| q(values[(t + shift) % values.len()]))).unwrap();
                let whole = robustness(&trace, &phi, 0).unwrap();
                let best = pieces.iter().map(|p| robustness(&trace, p, 0).unwrap()).reduce(|a, b| a.max(b)).unwrap();
                assert_eq!(whole, best, "limit {limit}");
                let late = robustness(&trace, &delay(&phi, 1), 0).unwrap();
                assert_eq!(late, robustness(&trace, &phi, 1).unwrap());
            }
        }
        assert_eq!(disjuncts(&f("F[0,20](x1 >= 0.2 & x1 <= 0.4)"), 64).len(), 21);
        assert_eq!(disjuncts(&f("F[0,20](x1 >= 0.2 & x1 <= 0.4)"), 20).len(), 1);
    }

    #[test]
    fn relaxation_moves_thresholds_outward() {
        let phi1 = f("G[0,20](x1 >= 0.2 & x1 <= 0.4)");
        assert_eq!(relax(&phi1, &q("0")).unwrap(), phi1);
        assert_eq!(relax(&f("x1 <= 0.4"), &q("0.04")).unwrap(), f("x1 <= 0.44"));
        assert_eq!(relax(&f("x1 >= 0.2"), &q("0.04")).unwrap(), f("x1 >= 0.16"));
        assert!(matches!(relax(&f("!x1 <= 0.4"), &q("0.1")), Err(Error::NegationPresent)));
    }
}

//! Bounded-time languages as explicit finite unions of boxes in `R^{n(T+1)}`.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result, Side};
use crate::formula::{Cmp, Formula};
use crate::geometry::{self, Rect};
use crate::rewrite::unroll_until;
use crate::scalar::Scalar;
use crate::trace::{Domain, Trace};

/// Default cap on the number of boxes any intermediate union may hold.
pub const DEFAULT_BOX_BUDGET: usize = 200_000;

/// One side of a coordinate range. `active` marks bounds that come from a
/// predicate; inactive bounds are the domain's and vanish under complement.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound<S> {
    pub value: S,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangBox<S> {
    pub lo: Vec<Bound<S>>,
    pub hi: Vec<Bound<S>>,
}

impl<S: Scalar> LangBox<S> {
    fn full(domain: &Domain<S>, coords: usize) -> Self {
        let n = domain.dims();
        let side = |pick: fn(&(S, S)) -> &S| {
            (0..coords).map(|c| Bound { value: pick(&domain.bounds()[c % n]).clone(), active: false }).collect()
        };
        LangBox { lo: side(|b| &b.0), hi: side(|b| &b.1) }
    }

    fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l.value > h.value)
    }

    fn intersect(&self, other: &Self) -> Option<Self> {
        let tighter = |a: &Bound<S>, b: &Bound<S>, keep_larger: bool| {
            if a.value == b.value {
                Bound { value: a.value.clone(), active: a.active || b.active }
            } else if (a.value > b.value) == keep_larger {
                a.clone()
            } else {
                b.clone()
            }
        };
        let lo: Vec<_> = self.lo.iter().zip(&other.lo).map(|(a, b)| tighter(a, b, true)).collect();
        let hi: Vec<_> = self.hi.iter().zip(&other.hi).map(|(a, b)| tighter(a, b, false)).collect();
        let out = LangBox { lo, hi };
        (!out.is_empty()).then_some(out)
    }

    /// `other` is inside `self`, and on every bound where the two touch an
    /// active bound of `self` is also active in `other`. Dropping `other`
    /// from a union then changes neither the union nor its closed complement.
    fn subsumes(&self, other: &Self) -> bool {
        let side = |mine: &Bound<S>, theirs: &Bound<S>, inner_is_larger: bool| {
            if mine.value == theirs.value {
                !mine.active || theirs.active
            } else {
                (theirs.value > mine.value) == inner_is_larger
            }
        };
        self.lo.iter().zip(&other.lo).all(|(m, t)| side(m, t, true))
            && self.hi.iter().zip(&other.hi).all(|(m, t)| side(m, t, false))
    }

    pub fn contains_point(&self, point: &[S]) -> bool {
        point.iter().enumerate().all(|(c, x)| self.lo[c].value <= *x && *x <= self.hi[c].value)
    }

    pub fn to_rect(&self) -> Rect<S> {
        Rect::new(
            self.lo.iter().map(|b| b.value.clone()).collect(),
            self.hi.iter().map(|b| b.value.clone()).collect(),
        )
    }
}

/// Finite union of closed boxes equal to `L(f)` for some formula `f`.
///
/// Coordinate `t * n + j` holds component `x^{j+1}` at time `t`.
#[derive(Debug, Clone)]
pub struct LanguageBoxUnion<S> {
    domain: Domain<S>,
    last_time: usize,
    boxes: Vec<LangBox<S>>,
}

impl<S: Scalar> LanguageBoxUnion<S> {
    pub fn dims(&self) -> usize {
        self.domain.dims()
    }

    pub fn last_time(&self) -> usize {
        self.last_time
    }

    pub fn domain(&self) -> &Domain<S> {
        &self.domain
    }

    pub fn boxes(&self) -> &[LangBox<S>] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn rects(&self) -> Vec<Rect<S>> {
        self.boxes.iter().map(LangBox::to_rect).collect()
    }

    pub fn coordinate(&self, t: usize, dim: usize) -> usize {
        t * self.dims() + dim
    }

    /// Membership of the prefix `s[0:T]`.
    pub fn contains(&self, s: &Trace<S>) -> bool {
        if s.dims() != self.dims() || s.last_time() < self.last_time {
            return false;
        }
        let point: Vec<S> = s.samples()[..=self.last_time].iter().flatten().cloned().collect();
        self.boxes.iter().any(|b| b.contains_point(&point))
    }

    /// Lebesgue measure in `R^{n(T+1)}`.
    pub fn measure(&self) -> S {
        geometry::union_measure(&self.rects())
    }

    /// `L(!f)`, the closed complement within the domain.
    pub fn complement(&self, budget: usize) -> Result<Self> {
        let builder = Builder { domain: &self.domain, coords: self.coords(), budget };
        Ok(self.with_boxes(builder.complement(&self.boxes)?))
    }

    pub fn intersect(&self, other: &Self, budget: usize) -> Result<Self> {
        let builder = Builder { domain: &self.domain, coords: self.coords(), budget };
        Ok(self.with_boxes(builder.intersect(&self.boxes, &other.boxes)?))
    }

    fn coords(&self) -> usize {
        (self.last_time + 1) * self.dims()
    }

    fn with_boxes(&self, boxes: Vec<LangBox<S>>) -> Self {
        LanguageBoxUnion { domain: self.domain.clone(), last_time: self.last_time, boxes }
    }
}

/// Builds `L(f)` over `domain` for traces `s[0:last_time]`.
pub fn language<S: Scalar>(f: &Formula<S>, domain: &Domain<S>, last_time: usize) -> Result<LanguageBoxUnion<S>> {
    language_with_budget(f, domain, last_time, DEFAULT_BOX_BUDGET)
}

pub fn language_with_budget<S: Scalar>(
    f: &Formula<S>,
    domain: &Domain<S>,
    last_time: usize,
    budget: usize,
) -> Result<LanguageBoxUnion<S>> {
    if f.horizon() > last_time {
        return Err(Error::HorizonExceeded { horizon: f.horizon(), bound: last_time });
    }
    if let Some(dim) = f.max_dim() {
        if dim >= domain.dims() {
            return Err(Error::DimensionOutOfRange { index: dim + 1, dims: domain.dims() });
        }
    }
    let builder = Builder { domain, coords: (last_time + 1) * domain.dims(), budget };
    let boxes = builder.build(f, 0, &mut HashMap::new())?;
    Ok(LanguageBoxUnion { domain: domain.clone(), last_time, boxes: boxes.as_ref().clone() })
}

type Memo<S> = HashMap<(*const Formula<S>, usize), Rc<Vec<LangBox<S>>>>;

struct Builder<'a, S> {
    domain: &'a Domain<S>,
    coords: usize,
    budget: usize,
}

impl<S: Scalar> Builder<'_, S> {
    fn full(&self) -> LangBox<S> {
        LangBox::full(self.domain, self.coords)
    }

    fn check(&self, size: usize) -> Result<()> {
        if size > self.budget {
            return Err(Error::BudgetExceeded { what: "language box", limit: self.budget });
        }
        Ok(())
    }

    fn build(&self, f: &Formula<S>, t: usize, memo: &mut Memo<S>) -> Result<Rc<Vec<LangBox<S>>>> {
        let key = (f as *const Formula<S>, t);
        if let Some(known) = memo.get(&key) {
            return Ok(known.clone());
        }
        let boxes = match f {
            Formula::True => vec![self.full()],
            Formula::False => vec![],
            Formula::Pred(p) => {
                let n = self.domain.dims();
                let c = t * n + p.dim;
                let mut b = self.full();
                let bound = Bound { value: p.threshold.clone(), active: true };
                match p.cmp {
                    Cmp::Le if p.threshold <= *self.domain.hi(p.dim) => b.hi[c] = bound,
                    Cmp::Ge if p.threshold >= *self.domain.lo(p.dim) => b.lo[c] = bound,
                    _ => {}
                }
                if b.is_empty() {
                    vec![]
                } else {
                    vec![b]
                }
            }
            Formula::Not(inner) => {
                let inner = self.build(inner, t, memo)?;
                self.complement(&inner)?
            }
            Formula::And(a, b) => {
                let a = self.build(a, t, memo)?;
                let b = self.build(b, t, memo)?;
                self.intersect(&a, &b)?
            }
            Formula::Or(a, b) => {
                let a = self.build(a, t, memo)?;
                let b = self.build(b, t, memo)?;
                self.prune(a.iter().chain(b.iter()).cloned().collect())?
            }
            Formula::Globally(i, inner) => {
                let mut acc = vec![self.full()];
                for k in i.steps() {
                    let next = self.build(inner, t + k, memo)?;
                    acc = self.intersect(&acc, &next)?;
                }
                acc
            }
            Formula::Eventually(i, inner) => {
                let mut acc = Vec::new();
                for k in i.steps() {
                    acc.extend(self.build(inner, t + k, memo)?.iter().cloned());
                }
                self.prune(acc)?
            }
            Formula::Until(a, i, b) => {
                let unrolled = unroll_until(a, *i, b);
                // The unrolled tree is temporary, so it gets its own memo.
                self.build(&unrolled, t, &mut HashMap::new())?.as_ref().clone()
            }
        };
        let boxes = Rc::new(boxes);
        memo.insert(key, boxes.clone());
        Ok(boxes)
    }

    fn intersect(&self, a: &[LangBox<S>], b: &[LangBox<S>]) -> Result<Vec<LangBox<S>>> {
        if a.len().saturating_mul(b.len()) > self.budget.saturating_mul(4) {
            return Err(Error::BudgetExceeded { what: "language box", limit: self.budget });
        }
        let out: Vec<LangBox<S>> = a.iter().flat_map(|x| b.iter().filter_map(move |y| x.intersect(y))).collect();
        self.prune(out)
    }

    /// `∩_i ∪_{active bounds of box i} (closed halfspace beyond that bound)`.
    fn complement(&self, boxes: &[LangBox<S>]) -> Result<Vec<LangBox<S>>> {
        let mut acc = vec![self.full()];
        for b in boxes {
            let mut halves = Vec::new();
            for c in 0..self.coords {
                if b.hi[c].active {
                    let mut h = self.full();
                    h.lo[c] = b.hi[c].clone();
                    halves.push(h);
                }
                if b.lo[c].active {
                    let mut h = self.full();
                    h.hi[c] = b.lo[c].clone();
                    halves.push(h);
                }
            }
            acc = self.intersect(&acc, &halves)?;
            if acc.is_empty() {
                break;
            }
        }
        Ok(acc)
    }

    fn prune(&self, boxes: Vec<LangBox<S>>) -> Result<Vec<LangBox<S>>> {
        let mut unique = boxes;
        // Boxes with few active bounds tend to subsume the rest; test them first.
        unique.sort_by_key(|b| b.lo.iter().chain(&b.hi).filter(|x| x.active).count());
        let mut kept: Vec<LangBox<S>> = Vec::new();
        for b in unique {
            if kept.iter().any(|k| k.subsumes(&b)) {
                continue;
            }
            kept.retain(|k| !b.subsumes(k));
            kept.push(b);
        }
        self.check(kept.len())?;
        Ok(kept)
    }
}

/// Exact `sup_{a in A} inf_{b in B} |a - b|_∞` between two languages.
pub fn brute_directed_ph<S: Scalar>(a: &LanguageBoxUnion<S>, b: &LanguageBoxUnion<S>) -> Result<S> {
    if a.dims() != b.dims() || a.last_time() != b.last_time() {
        return Err(Error::DimensionMismatch("languages differ in dimension or length".into()));
    }
    if a.is_empty() {
        return Err(Error::EmptyLanguage(Side::First));
    }
    geometry::directed_hausdorff(&a.rects(), &b.rects()).ok_or(Error::EmptyLanguage(Side::Second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::robustness::robustness;
    use crate::scalar::Rational;

    fn q(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    fn lang(text: &str, last_time: usize) -> LanguageBoxUnion<Rational> {
        language(&parse_formula(text, 1).unwrap(), &Domain::unit(1), last_time).unwrap()
    }

    const THETA1: &str = "(x1 >= 0.2 & x1 <= 0.4)";

    #[test]
    fn box_counts_of_example_formulae() {
        assert_eq!(lang("G[0,20](x1 >= 0.2 & x1 <= 0.44)", 20).len(), 1);
        assert_eq!(lang(&format!("F[0,20]{THETA1}"), 20).len(), 21);
        assert_eq!(lang("T", 20).len(), 1);
        assert_eq!(lang("T", 20).boxes()[0], LangBox::full(&Domain::unit(1), 21));
        let phi4 = format!("G[0,20]{THETA1} & F[0,20](x1 >= 0.2 & x1 <= 0.44)");
        assert_eq!(lang(&phi4, 20).len(), 1);
        assert!(lang("x1 >= 1.5", 0).is_empty());
    }

    #[test]
    fn complement_keeps_faces() {
        let not_top = lang("!(x1 <= 1)", 0);
        assert_eq!(not_top.len(), 1);
        assert_eq!(not_top.boxes()[0].lo[0].value, q("1"));
        assert!(lang("!T", 3).is_empty());
        assert_eq!(lang("!!F", 3).len(), 0);
        let band = lang(THETA1, 0);
        let twice = band.complement(DEFAULT_BOX_BUDGET).unwrap().complement(DEFAULT_BOX_BUDGET).unwrap();
        assert_eq!(twice.measure(), band.measure());
    }

    #[test]
    fn membership_matches_monitor_on_grid() {
        let formulas = [
            "!G[0,2] x1 <= 0.5",
            "F[0,2] x1 >= 0.5",
            "x1 >= 0.25 U[1,2] x1 >= 0.75",
            "!(x1 >= 0.25 U[0,2] !x1 <= 0.5)",
            "G[0,1] F[0,1] (x1 <= 0.25 | x1 >= 0.75)",
        ];
        let grid = ["0", "0.25", "0.5", "0.75", "1"];
        for text in formulas {
            let f = parse_formula::<Rational>(text, 1).unwrap();
            let l = language(&f, &Domain::unit(1), 2).unwrap();
            for code in 0..125 {
                let values = [code % 5, code / 5 % 5, code / 25].map(|k| q(grid[k]));
                let s = Trace::scalar(values).unwrap();
                assert_eq!(l.contains(&s), robustness(&s, &f, 0).unwrap().satisfied(), "{text} on {code}");
            }
        }
        assert_eq!(
            lang("!G[0,2] x1 <= 0.5", 2).boxes().len(),
            lang("F[0,2] x1 >= 0.5", 2).boxes().len()
        );
    }

    #[test]
    fn brute_distances() {
        let phi1 = lang(&format!("G[0,20]{THETA1}"), 20);
        let phi2 = lang("G[0,20](x1 >= 0.2 & x1 <= 0.44)", 20);
        assert_eq!(brute_directed_ph(&phi2, &phi1).unwrap(), q("0.04"));
        assert_eq!(brute_directed_ph(&phi1, &phi2).unwrap(), q("0"));
        let phi5 = lang(&format!("G[0,10]{THETA1} & G[12,20](x1 >= 0.2 & x1 <= 0.44)"), 20);
        let phi6 = lang(&format!("G[0,16] F[0,4] {THETA1}"), 20);
        assert_eq!(brute_directed_ph(&phi6, &phi5).unwrap(), q("0.6"));
        let empty = lang("F", 20);
        assert!(matches!(brute_directed_ph(&empty, &phi1), Err(Error::EmptyLanguage(Side::First))));
    }
}

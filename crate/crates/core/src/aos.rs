//! Area-of-satisfaction boxes: formulae as unions of space-time boxes, with
//! choice nodes for disjunction and windowed eventually.
//!
//! Time is continuous here. A leaf is read slice by slice: at time `t` the
//! allowed values are the union of the boxes whose window contains `t`, and a
//! time no box covers is unconstrained. Conjunction and globally are computed
//! on the elementary time pieces cut out by the box windows, which agrees
//! with the pairwise `combine` rule whenever each side holds one box.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{Cmp, Formula};
use crate::geometry::{self, Rect};
use crate::scalar::{smax, smin, Scalar};

pub const DEFAULT_RESOLUTION_BUDGET: usize = 1 << 16;

/// Per-dimension value ranges; dimensions absent from the map span `[0, 1]`.
pub type ValueBox<S> = BTreeMap<usize, (S, S)>;

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeBox<S> {
    pub lt: S,
    pub ut: S,
    pub ranges: ValueBox<S>,
}

impl<S: Scalar> SpaceTimeBox<S> {
    pub fn new(lt: S, ut: S, ranges: ValueBox<S>) -> Self {
        SpaceTimeBox { lt, ut, ranges }
    }

    /// Box constraining only dimension `dim`.
    pub fn band(lt: S, ut: S, dim: usize, lv: S, uv: S) -> Self {
        SpaceTimeBox { lt, ut, ranges: BTreeMap::from([(dim, (lv, uv))]) }
    }

    pub fn range(&self, dim: usize) -> (S, S) {
        self.ranges.get(&dim).cloned().unwrap_or((S::zero(), S::one()))
    }

    /// Closed rectangle over `(time, x1, ..., xn)`.
    pub fn to_rect(&self, dims: usize) -> Rect<S> {
        let mut lo = vec![self.lt.clone()];
        let mut hi = vec![self.ut.clone()];
        for d in 0..dims {
            let (l, h) = self.range(d);
            lo.push(l);
            hi.push(h);
        }
        Rect::new(lo, hi)
    }

    pub fn area(&self, dims: usize) -> S {
        self.to_rect(dims).volume()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dims: Vec<serde_json::Value> = self
            .ranges
            .iter()
            .map(|(d, (l, h))| serde_json::json!({ "dim": d + 1, "lv": l.to_f64_lossy(), "uv": h.to_f64_lossy() }))
            .collect();
        serde_json::json!({ "lt": self.lt.to_f64_lossy(), "ut": self.ut.to_f64_lossy(), "dims": dims })
    }
}

/// `[max lt, min ut]` when the windows meet (closed windows).
pub fn overlap<S: Scalar>(b1: &SpaceTimeBox<S>, b2: &SpaceTimeBox<S>) -> Option<(S, S)> {
    let lo = smax(b1.lt.clone(), b2.lt.clone());
    let hi = smin(b1.ut.clone(), b2.ut.clone());
    (lo <= hi).then_some((lo, hi))
}

fn meet_values<S: Scalar>(a: &ValueBox<S>, b: &ValueBox<S>) -> Option<ValueBox<S>> {
    let mut out = a.clone();
    for (d, (l, h)) in b {
        let merged = match out.get(d) {
            Some((l0, h0)) => (smax(l0.clone(), l.clone()), smin(h0.clone(), h.clone())),
            None => (l.clone(), h.clone()),
        };
        if merged.0 > merged.1 {
            return None;
        }
        out.insert(*d, merged);
    }
    Some(out)
}

fn value_subset<S: Scalar>(inner: &ValueBox<S>, outer: &ValueBox<S>) -> bool {
    outer.iter().all(|(d, (l, h))| match inner.get(d) {
        Some((il, ih)) => l <= il && ih <= h,
        None => l.is_zero() && h.is_one(),
    })
}

/// Intersection over the overlap window plus the slices of each box outside
/// it. An empty intersection means the conjunction cannot hold and gives an
/// empty set.
pub fn combine<S: Scalar>(b1: &SpaceTimeBox<S>, b2: &SpaceTimeBox<S>) -> Result<Vec<SpaceTimeBox<S>>> {
    let (lo, hi) = overlap(b1, b2).ok_or(Error::NoOverlap)?;
    let Some(ranges) = meet_values(&b1.ranges, &b2.ranges) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for b in [b1, b2] {
        if b.lt < lo {
            out.push(SpaceTimeBox::new(b.lt.clone(), lo.clone(), b.ranges.clone()));
        }
    }
    out.push(SpaceTimeBox::new(lo.clone(), hi.clone(), ranges));
    for b in [b1, b2] {
        if b.ut > hi {
            out.push(SpaceTimeBox::new(hi.clone(), b.ut.clone(), b.ranges.clone()));
        }
    }
    Ok(out)
}

/// Elementary time piece: a cut point or the open gap between two cuts.
#[derive(Debug, Clone)]
enum Piece<S> {
    Point(S),
    Open(S, S),
}

impl<S: Scalar> Piece<S> {
    fn lo(&self) -> &S {
        match self {
            Piece::Point(c) | Piece::Open(c, _) => c,
        }
    }

    fn hi(&self) -> &S {
        match self {
            Piece::Point(c) | Piece::Open(_, c) => c,
        }
    }

    fn sample(&self) -> S {
        match self {
            Piece::Point(c) => c.clone(),
            Piece::Open(a, b) => (a.clone() + b.clone()) / S::from_i64(2).expect("two"),
        }
    }
}

fn sort_dedup<S: Scalar>(mut cuts: Vec<S>) -> Vec<S> {
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("comparable scalars"));
    cuts.dedup();
    cuts
}

fn pieces<S: Scalar>(cuts: &[S]) -> Vec<Piece<S>> {
    let mut out = Vec::new();
    for (i, c) in cuts.iter().enumerate() {
        out.push(Piece::Point(c.clone()));
        if let Some(next) = cuts.get(i + 1) {
            out.push(Piece::Open(c.clone(), next.clone()));
        }
    }
    out
}

fn cuts_of<S: Scalar>(boxes: &[SpaceTimeBox<S>]) -> Vec<S> {
    sort_dedup(boxes.iter().flat_map(|b| [b.lt.clone(), b.ut.clone()]).collect())
}

/// Value boxes of the boxes whose window contains the whole piece.
fn cover<'a, S: Scalar>(boxes: &'a [SpaceTimeBox<S>], piece: &Piece<S>) -> Vec<&'a ValueBox<S>> {
    let mut out: Vec<&ValueBox<S>> = Vec::new();
    for b in boxes {
        if b.lt <= *piece.lo() && *piece.hi() <= b.ut && !out.contains(&&b.ranges) {
            out.push(&b.ranges);
        }
    }
    out
}

/// Drops value boxes contained in another one.
fn prune<S: Scalar>(mut boxes: Vec<ValueBox<S>>) -> Vec<ValueBox<S>> {
    let mut keep: Vec<ValueBox<S>> = Vec::new();
    boxes.dedup();
    for (i, b) in boxes.iter().enumerate() {
        let dominated = boxes.iter().enumerate().any(|(j, o)| j != i && value_subset(b, o) && (!value_subset(o, b) || j < i));
        if !dominated {
            keep.push(b.clone());
        }
    }
    keep
}

/// Reassembles per-piece value boxes into maximal boxes. Point-only boxes
/// next to a covered gap are dropped; they add no area.
fn assemble<S: Scalar>(per_piece: Vec<(Piece<S>, Vec<ValueBox<S>>)>) -> Vec<SpaceTimeBox<S>> {
    let mut out = Vec::new();
    let mut runs: Vec<(ValueBox<S>, S, S)> = Vec::new();
    for (i, (piece, values)) in per_piece.iter().enumerate() {
        let mut next_runs = Vec::new();
        for (v, start, end) in runs.drain(..) {
            if values.contains(&v) {
                next_runs.push((v, start, piece.hi().clone()));
            } else {
                out.push((v, start, end));
            }
        }
        for v in values {
            if !next_runs.iter().any(|(w, _, _)| w == v) {
                let isolated_point = matches!(piece, Piece::Point(_))
                    && [i.checked_sub(1), Some(i + 1)]
                        .into_iter()
                        .flatten()
                        .any(|j| per_piece.get(j).is_some_and(|(p, vs)| matches!(p, Piece::Open(..)) && !vs.is_empty()));
                if !isolated_point {
                    next_runs.push((v.clone(), piece.lo().clone(), piece.hi().clone()));
                }
            }
        }
        runs = next_runs;
    }
    out.extend(runs);
    out.into_iter().map(|(v, lt, ut)| SpaceTimeBox::new(lt, ut, v)).collect()
}

/// Conjunction of two leaves; `None` when some time piece is contradictory.
fn meet<S: Scalar>(a: &[SpaceTimeBox<S>], b: &[SpaceTimeBox<S>]) -> Vec<SpaceTimeBox<S>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut cuts = cuts_of(a);
    cuts.extend(cuts_of(b));
    let mut per_piece = Vec::new();
    for piece in pieces(&sort_dedup(cuts)) {
        let (ca, cb) = (cover(a, &piece), cover(b, &piece));
        let values: Vec<ValueBox<S>> = match (ca.is_empty(), cb.is_empty()) {
            (true, true) => Vec::new(),
            (false, true) => ca.into_iter().cloned().collect(),
            (true, false) => cb.into_iter().cloned().collect(),
            (false, false) => {
                let both: Vec<ValueBox<S>> = ca.iter().flat_map(|x| cb.iter().filter_map(|y| meet_values(x, y))).collect();
                if both.is_empty() {
                    return Vec::new();
                }
                prune(both)
            }
        };
        per_piece.push((piece, values));
    }
    assemble(per_piece)
}

/// `G[t1,t2]` of a leaf: at time `s` every value allowed at every time in
/// `[s - t2, s - t1]`. A single box simply widens to `[lt + t1, ut + t2]`.
fn globally<S: Scalar>(boxes: &[SpaceTimeBox<S>], t1: &S, t2: &S) -> Vec<SpaceTimeBox<S>> {
    if boxes.is_empty() {
        return Vec::new();
    }
    let cuts = cuts_of(boxes);
    let inner = pieces(&cuts);
    let shifted = sort_dedup(cuts.iter().flat_map(|c| [c.clone() + t1.clone(), c.clone() + t2.clone()]).collect());
    let mut per_piece = Vec::new();
    for piece in pieces(&shifted) {
        let s = piece.sample();
        let (from, to) = (s.clone() - t2.clone(), s - t1.clone());
        let mut acc: Option<Vec<ValueBox<S>>> = None;
        for p in &inner {
            let touched = match p {
                Piece::Point(c) => from <= *c && *c <= to,
                Piece::Open(a, b) => *a < to && from < *b,
            };
            if !touched {
                continue;
            }
            let allowed = cover(boxes, p);
            if allowed.is_empty() {
                continue;
            }
            let next: Vec<ValueBox<S>> = match &acc {
                None => allowed.into_iter().cloned().collect(),
                Some(current) => current.iter().flat_map(|x| allowed.iter().filter_map(|y| meet_values(x, y))).collect(),
            };
            if next.is_empty() {
                return Vec::new();
            }
            acc = Some(prune(next));
        }
        per_piece.push((piece, acc.unwrap_or_default()));
    }
    assemble(per_piece)
}

/// Box sets combined by choice. Every resolution (one side of each choice)
/// is a leaf.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxExpr<S> {
    Leaf(Vec<SpaceTimeBox<S>>),
    Choice(Box<BoxExpr<S>>, Box<BoxExpr<S>>),
}

impl<S: Scalar> BoxExpr<S> {
    pub fn leaf(boxes: Vec<SpaceTimeBox<S>>) -> Self {
        BoxExpr::Leaf(boxes)
    }

    pub fn choice(a: BoxExpr<S>, b: BoxExpr<S>) -> Self {
        BoxExpr::Choice(Box::new(a), Box::new(b))
    }

    pub fn empty() -> Self {
        BoxExpr::Leaf(Vec::new())
    }

    /// Number of resolutions.
    pub fn resolution_count(&self) -> usize {
        match self {
            BoxExpr::Leaf(_) => 1,
            BoxExpr::Choice(a, b) => a.resolution_count().saturating_add(b.resolution_count()),
        }
    }

    pub fn resolutions(&self) -> Resolutions<'_, S> {
        Resolutions { stack: vec![self] }
    }

    pub(crate) fn map_leaves(&self, f: &impl Fn(&[SpaceTimeBox<S>]) -> Vec<SpaceTimeBox<S>>) -> BoxExpr<S> {
        match self {
            BoxExpr::Leaf(boxes) => BoxExpr::Leaf(f(boxes)),
            BoxExpr::Choice(a, b) => BoxExpr::choice(a.map_leaves(f), b.map_leaves(f)),
        }
    }

    /// Pairs every resolution of `self` with every resolution of `other`.
    pub(crate) fn zip_with(
        &self,
        other: &BoxExpr<S>,
        f: &impl Fn(&[SpaceTimeBox<S>], &[SpaceTimeBox<S>]) -> Vec<SpaceTimeBox<S>>,
    ) -> BoxExpr<S> {
        match (self, other) {
            (BoxExpr::Choice(a, b), _) => BoxExpr::choice(a.zip_with(other, f), b.zip_with(other, f)),
            (BoxExpr::Leaf(x), BoxExpr::Choice(a, b)) => {
                BoxExpr::choice(self.zip_with(a, f), BoxExpr::Leaf(x.clone()).zip_with(b, f))
            }
            (BoxExpr::Leaf(x), BoxExpr::Leaf(y)) => BoxExpr::Leaf(f(x, y)),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            BoxExpr::Leaf(boxes) => {
                serde_json::json!({ "leaf": boxes.iter().map(SpaceTimeBox::to_json).collect::<Vec<_>>() })
            }
            BoxExpr::Choice(a, b) => serde_json::json!({ "choice": [a.to_json(), b.to_json()] }),
        }
    }
}

/// Depth-first iterator over resolutions.
pub struct Resolutions<'a, S> {
    stack: Vec<&'a BoxExpr<S>>,
}

impl<'a, S> Iterator for Resolutions<'a, S> {
    type Item = &'a [SpaceTimeBox<S>];

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(e) = self.stack.pop() {
            match e {
                BoxExpr::Leaf(boxes) => return Some(boxes),
                BoxExpr::Choice(a, b) => {
                    self.stack.push(b);
                    self.stack.push(a);
                }
            }
        }
        None
    }
}

/// How sample times map to windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeWindow {
    /// Windows are the operator intervals as written.
    #[default]
    Literal,
    /// Every window is extended by one time unit on the right, as when each
    /// sample `t` covers `[t, t + 1]`.
    Extended,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AosConfig<S> {
    /// Per-dimension scale mapping signal values into `[0, 1]`.
    pub x_max: Vec<S>,
    /// Hold window used to expand eventually.
    pub delta: S,
    /// Time bound `T`; `T` itself spans `[0, T]`.
    pub horizon: S,
    pub window: TimeWindow,
    pub resolution_budget: usize,
}

impl<S: Scalar> AosConfig<S> {
    pub fn new(x_max: Vec<S>, delta: S, horizon: S) -> Self {
        AosConfig { x_max, delta, horizon, window: TimeWindow::Literal, resolution_budget: DEFAULT_RESOLUTION_BUDGET }
    }

    /// Unit value space, `δ = 1`.
    pub fn unit(dims: usize, horizon: usize) -> Self {
        Self::new(vec![S::one(); dims], S::one(), S::from_usize(horizon).expect("horizon fits"))
    }

    pub fn dims(&self) -> usize {
        self.x_max.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_max.is_empty() || self.x_max.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidConfig("x_max must be positive in every dimension".into()));
        }
        if !self.delta.is_positive() {
            return Err(Error::InvalidConfig("delta must be positive".into()));
        }
        if self.horizon.is_negative() {
            return Err(Error::InvalidConfig("horizon must be nonnegative".into()));
        }
        Ok(())
    }
}

fn simplify<S: Scalar>(f: &Formula<S>) -> Formula<S> {
    match f {
        Formula::And(a, b) => match (simplify(a), simplify(b)) {
            (Formula::True, x) | (x, Formula::True) => x,
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (x, y) => Formula::and(x, y),
        },
        Formula::Or(a, b) => match (simplify(a), simplify(b)) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, x) | (x, Formula::False) => x,
            (x, y) => Formula::or(x, y),
        },
        Formula::Globally(i, g) => match simplify(g) {
            c @ (Formula::True | Formula::False) => c,
            x => Formula::globally(*i, x),
        },
        Formula::Eventually(i, g) => match simplify(g) {
            c @ (Formula::True | Formula::False) => c,
            x => Formula::eventually(*i, x),
        },
        other => other.clone(),
    }
}

struct Converter<'a, S> {
    cfg: &'a AosConfig<S>,
}

impl<S: Scalar> Converter<'_, S> {
    fn check(&self, e: BoxExpr<S>) -> Result<BoxExpr<S>> {
        if e.resolution_count() > self.cfg.resolution_budget {
            return Err(Error::BudgetExceeded { what: "choice resolution", limit: self.cfg.resolution_budget });
        }
        Ok(e)
    }

    fn time(&self, steps: usize) -> S {
        S::from_usize(steps).expect("time fits")
    }

    fn convert(&self, f: &Formula<S>) -> Result<BoxExpr<S>> {
        match f {
            Formula::True => Ok(BoxExpr::Leaf(vec![SpaceTimeBox::new(S::zero(), S::zero(), BTreeMap::new())])),
            Formula::False => Ok(BoxExpr::empty()),
            Formula::Not(_) => Err(Error::NegationPresent),
            Formula::Until(..) => Err(Error::UntilUnsupported),
            Formula::Pred(p) => {
                let scale = self.cfg.x_max.get(p.dim).ok_or(Error::DimensionOutOfRange {
                    index: p.dim + 1,
                    dims: self.cfg.dims(),
                })?;
                let mu = p.threshold.clone() / scale.clone();
                let (lv, uv) = match p.cmp {
                    Cmp::Le => (S::zero(), smin(mu, S::one())),
                    Cmp::Ge => (smax(mu, S::zero()), S::one()),
                };
                if lv > uv {
                    return Ok(BoxExpr::empty());
                }
                Ok(BoxExpr::Leaf(vec![SpaceTimeBox::band(S::zero(), S::zero(), p.dim, lv, uv)]))
            }
            Formula::And(a, b) => {
                let (ea, eb) = (self.convert(a)?, self.convert(b)?);
                if ea.resolution_count().saturating_mul(eb.resolution_count()) > self.cfg.resolution_budget {
                    return Err(Error::BudgetExceeded { what: "choice resolution", limit: self.cfg.resolution_budget });
                }
                Ok(ea.zip_with(&eb, &|x, y| meet(x, y)))
            }
            Formula::Or(a, b) => self.check(BoxExpr::choice(self.convert(a)?, self.convert(b)?)),
            Formula::Globally(i, g) => {
                let (t1, t2) = (self.time(i.lo), self.time(i.hi));
                Ok(self.convert(g)?.map_leaves(&|boxes| globally(boxes, &t1, &t2)))
            }
            Formula::Eventually(i, g) => {
                let inner = self.convert(g)?;
                let (t1, t2) = (self.time(i.lo), self.time(i.hi));
                let mut windows = Vec::new();
                let mut start = t1.clone();
                loop {
                    let end = smin(start.clone() + self.cfg.delta.clone(), t2.clone());
                    windows.push((start.clone(), end.clone()));
                    if end >= t2 {
                        break;
                    }
                    start = end;
                    if windows.len() > self.cfg.resolution_budget {
                        return Err(Error::BudgetExceeded { what: "choice resolution", limit: self.cfg.resolution_budget });
                    }
                }
                let mut parts: Vec<BoxExpr<S>> =
                    windows.iter().map(|(a, b)| inner.map_leaves(&|boxes| globally(boxes, a, b))).collect();
                let mut chain = parts.pop().expect("at least one window");
                while let Some(next) = parts.pop() {
                    chain = self.check(BoxExpr::choice(next, chain))?;
                }
                Ok(chain)
            }
        }
    }
}

/// Box expression of a negation-free, until-free formula.
pub fn aos<S: Scalar>(f: &Formula<S>, cfg: &AosConfig<S>) -> Result<BoxExpr<S>> {
    cfg.validate()?;
    if f.contains_negation() {
        return Err(Error::NegationPresent);
    }
    if f.contains_until() {
        return Err(Error::UntilUnsupported);
    }
    let f = simplify(f);
    let expr = match f {
        Formula::True => BoxExpr::Leaf(vec![SpaceTimeBox::new(S::zero(), cfg.horizon.clone(), BTreeMap::new())]),
        ref other => Converter { cfg }.convert(other)?,
    };
    Ok(match cfg.window {
        TimeWindow::Literal => expr,
        TimeWindow::Extended => expr.map_leaves(&|boxes| {
            boxes.iter().map(|b| SpaceTimeBox::new(b.lt.clone(), b.ut.clone() + S::one(), b.ranges.clone())).collect()
        }),
    })
}

/// Measure of the union of `boxes` in `[0, 1]^dims × time`.
pub fn union_area<S: Scalar>(boxes: &[SpaceTimeBox<S>], dims: usize) -> S {
    let rects: Vec<Rect<S>> = boxes.iter().map(|b| b.to_rect(dims)).collect();
    geometry::union_measure(&rects)
}

/// Measure of `(union a) ∩ (union b)`.
pub fn intersection_area<S: Scalar>(a: &[SpaceTimeBox<S>], b: &[SpaceTimeBox<S>], dims: usize) -> S {
    let ra: Vec<Rect<S>> = a.iter().map(|x| x.to_rect(dims)).collect();
    let rb: Vec<Rect<S>> = b.iter().map(|x| x.to_rect(dims)).collect();
    geometry::intersection_measure(&ra, &rb)
}

/// Sorted distinct window endpoints.
pub fn time_cuts<S: Scalar>(boxes: &[SpaceTimeBox<S>]) -> Vec<S> {
    cuts_of(boxes)
}

/// Allowed values over the time span `[from, to]` as rectangles in
/// `[0, 1]^dims`: the boxes whose window contains the span, or the whole cube
/// when none does.
pub fn slice<S: Scalar>(boxes: &[SpaceTimeBox<S>], from: &S, to: &S, dims: usize) -> Vec<Rect<S>> {
    let piece = Piece::Open(from.clone(), to.clone());
    let covering = cover(boxes, &piece);
    let to_rect = |v: &ValueBox<S>| {
        let (lo, hi) = (0..dims)
            .map(|d| v.get(&d).cloned().unwrap_or((S::zero(), S::one())))
            .unzip();
        Rect::new(lo, hi)
    };
    if covering.is_empty() {
        return vec![to_rect(&BTreeMap::new())];
    }
    covering.into_iter().map(to_rect).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::scalar::Rational;

    fn q(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    fn band(lt: &str, ut: &str, lv: &str, uv: &str) -> SpaceTimeBox<Rational> {
        SpaceTimeBox::band(q(lt), q(ut), 0, q(lv), q(uv))
    }

    fn boxes(text: &str) -> BoxExpr<Rational> {
        aos(&parse_formula(text, 1).unwrap(), &AosConfig::unit(1, 20)).unwrap()
    }

    const THETA1: &str = "(x1 >= 0.2 & x1 <= 0.4)";
    const THETA2: &str = "(x1 >= 0.2 & x1 <= 0.44)";

    #[test]
    fn globally_gives_one_band() {
        assert_eq!(boxes(&format!("G[0,20]{THETA1}")), BoxExpr::Leaf(vec![band("0", "20", "0.2", "0.4")]));
        let phi5 = boxes(&format!("G[0,10]{THETA1} & G[12,20]{THETA2}"));
        assert_eq!(phi5, BoxExpr::Leaf(vec![band("0", "10", "0.2", "0.4"), band("12", "20", "0.2", "0.44")]));
    }

    #[test]
    fn eventually_becomes_a_choice_chain() {
        let phi3 = boxes(&format!("F[0,20]{THETA1}"));
        let leaves: Vec<_> = phi3.resolutions().collect();
        assert_eq!(leaves.len(), 20);
        for (i, leaf) in leaves.iter().enumerate() {
            let i = i.to_string();
            let j = (i.parse::<i64>().unwrap() + 1).to_string();
            assert_eq!(*leaf, [band(&i, &j, "0.2", "0.4")]);
        }
        let phi6 = boxes(&format!("G[0,16] F[0,4] {THETA1}"));
        let leaves: Vec<_> = phi6.resolutions().collect();
        assert_eq!(leaves.len(), 4);
        assert_eq!(leaves[3], [band("3", "20", "0.2", "0.4")]);
    }

    #[test]
    fn overlap_windows() {
        let b = |lt: &str, ut: &str| band(lt, ut, "0", "1");
        assert_eq!(overlap(&b("0", "10"), &b("12", "20")), None);
        assert_eq!(overlap(&b("0", "20"), &b("5", "7")), Some((q("5"), q("7"))));
        assert_eq!(overlap(&b("0", "5"), &b("5", "9")), Some((q("5"), q("5"))));
    }

    #[test]
    fn combine_slices_outside_the_overlap() {
        let out = combine(&band("0", "20", "0.2", "0.4"), &band("5", "6", "0.2", "0.44")).unwrap();
        assert_eq!(out, vec![band("0", "5", "0.2", "0.4"), band("5", "6", "0.2", "0.4"), band("6", "20", "0.2", "0.4")]);
        let b = band("0", "20", "0.2", "0.4");
        assert_eq!(union_area(&combine(&b, &b).unwrap(), 1), q("4"));
        let other = SpaceTimeBox::band(q("0"), q("10"), 1, q("0.5"), q("0.9"));
        let first = SpaceTimeBox::band(q("0"), q("10"), 0, q("0.2"), q("0.4"));
        let both = combine(&first, &other).unwrap();
        assert_eq!(both.len(), 1);
        assert_eq!(both[0].ranges.len(), 2);
        assert!(combine(&band("0", "1", "0", "0.1"), &band("0", "1", "0.5", "1")).unwrap().is_empty());
        assert!(matches!(combine(&band("0", "1", "0", "1"), &band("2", "3", "0", "1")), Err(Error::NoOverlap)));
    }

    #[test]
    fn conjunction_with_eventually_keeps_the_band() {
        let phi4 = boxes(&format!("G[0,20]{THETA1} & F[0,20]{THETA2}"));
        assert_eq!(phi4.resolution_count(), 20);
        for leaf in phi4.resolutions() {
            assert_eq!(union_area(leaf, 1), q("4"));
        }
    }

    #[test]
    fn contradictions_give_empty_leaves() {
        assert_eq!(boxes("G[0,5] x1 <= 0.2 & G[5,9] x1 >= 0.3"), BoxExpr::empty());
        assert_eq!(boxes("x1 >= 1.5"), BoxExpr::empty());
    }

    #[test]
    fn areas() {
        assert_eq!(union_area(&[band("0", "20", "0.2", "0.4")], 1), q("4"));
        assert_eq!(union_area(&[band("0", "1", "0", "1"), band("5", "6", "0", "1")], 1), q("2"));
        assert_eq!(union_area(&[band("0", "2", "0", "1"), band("1", "3", "0", "1")], 1), q("3"));
        assert_eq!(union_area(&[SpaceTimeBox::new(q("0"), q("20"), BTreeMap::new())], 1), q("20"));
    }

    #[test]
    fn rejects_until_and_negation() {
        let cfg = AosConfig::unit(1, 20);
        let until = parse_formula::<Rational>("x1 <= 0.5 U[0,2] x1 >= 0.6", 1).unwrap();
        assert!(matches!(aos(&until, &cfg), Err(Error::UntilUnsupported)));
        let neg = parse_formula::<Rational>("!(x1 <= 0.5)", 1).unwrap();
        assert!(matches!(aos(&neg, &cfg), Err(Error::NegationPresent)));
    }

    #[test]
    fn windows_overlapping_with_different_bands_intersect() {
        // Globally over a two-band leaf: where the shifted bands overlap both hold.
        let e = boxes("G[0,4] (G[0,1] x1 <= 0.5 & G[2,3] x1 >= 0.3)");
        let BoxExpr::Leaf(leaf) = e else { panic!("expected a leaf") };
        assert_eq!(union_area(&leaf, 1), q("0.5") * q("2") + q("0.2") * q("3") + q("0.7") * q("2"));
    }

    #[test]
    fn extended_windows_add_one_unit() {
        let mut cfg = AosConfig::unit(1, 20);
        cfg.window = TimeWindow::Extended;
        let e = aos(&parse_formula::<Rational>(&format!("G[0,20]{THETA1}"), 1).unwrap(), &cfg).unwrap();
        assert_eq!(e, BoxExpr::Leaf(vec![band("0", "21", "0.2", "0.4")]));
    }
}

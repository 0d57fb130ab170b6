//! Closed axis-aligned boxes: exact union measure, coverage and L∞ Hausdorff
//! distance between finite unions.
//!
//! Union measure and coverage share one sweep. Coordinates are processed in
//! order; along each coordinate the bounds of the surviving boxes cut the
//! target into cells, and the boxes that span a cell survive into the next
//! coordinate. Sub-problems are memoized on `(coordinate, survivors)`, which
//! keeps languages of nested temporal formulae (hundreds of boxes in tens of
//! dimensions) tractable.

use std::collections::HashMap;

use crate::scalar::{smax, smin, Scalar};

/// Closed box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect<S> {
    pub lo: Vec<S>,
    pub hi: Vec<S>,
}

impl<S: Scalar> Rect<S> {
    pub fn new(lo: Vec<S>, hi: Vec<S>) -> Self {
        assert_eq!(lo.len(), hi.len(), "corner dimensions differ");
        Rect { lo, hi }
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn volume(&self) -> S {
        if self.is_empty() {
            return S::zero();
        }
        self.lo.iter().zip(&self.hi).fold(S::one(), |acc, (l, h)| acc * (h.clone() - l.clone()))
    }

    /// Intersection, `None` when empty.
    pub fn intersect(&self, other: &Rect<S>) -> Option<Rect<S>> {
        let lo: Vec<S> = self.lo.iter().zip(&other.lo).map(|(a, b)| smax(a.clone(), b.clone())).collect();
        let hi: Vec<S> = self.hi.iter().zip(&other.hi).map(|(a, b)| smin(a.clone(), b.clone())).collect();
        let rect = Rect { lo, hi };
        (!rect.is_empty()).then_some(rect)
    }

    pub fn contains(&self, other: &Rect<S>) -> bool {
        (0..self.dims()).all(|c| self.lo[c] <= other.lo[c] && other.hi[c] <= self.hi[c])
    }

    pub fn contains_point(&self, point: &[S]) -> bool {
        point.iter().enumerate().all(|(c, x)| self.lo[c] <= *x && *x <= self.hi[c])
    }

    /// Minkowski sum with the L∞ ball of radius `eps`.
    pub fn inflate(&self, eps: &S) -> Rect<S> {
        Rect {
            lo: self.lo.iter().map(|l| l.clone() - eps.clone()).collect(),
            hi: self.hi.iter().map(|h| h.clone() + eps.clone()).collect(),
        }
    }

    /// L∞ distance from a point to the box.
    pub fn distance_to_point(&self, point: &[S]) -> S {
        point.iter().enumerate().fold(S::zero(), |acc, (c, x)| {
            let below = self.lo[c].clone() - x.clone();
            let above = x.clone() - self.hi[c].clone();
            smax(acc, smax(below, above))
        })
    }
}

/// Smallest box containing every input; `None` for an empty list.
pub fn bounding_box<S: Scalar>(rects: &[Rect<S>]) -> Option<Rect<S>> {
    let first = rects.first()?.clone();
    Some(rects[1..].iter().fold(first, |acc, r| Rect {
        lo: acc.lo.into_iter().zip(&r.lo).map(|(a, b)| smin(a, b.clone())).collect(),
        hi: acc.hi.into_iter().zip(&r.hi).map(|(a, b)| smax(a, b.clone())).collect(),
    }))
}

struct Sweep<'a, S> {
    target: &'a Rect<S>,
    rects: &'a [Rect<S>],
}

impl<S: Scalar> Sweep<'_, S> {
    /// Cells of `target` along `coord` with the survivors spanning each cell.
    fn cells(&self, coord: usize, alive: &[u32]) -> Vec<(S, S, Vec<u32>)> {
        let (tl, th) = (&self.target.lo[coord], &self.target.hi[coord]);
        if tl == th {
            let next = alive
                .iter()
                .copied()
                .filter(|&i| {
                    let r = &self.rects[i as usize];
                    r.lo[coord] <= *tl && *tl <= r.hi[coord]
                })
                .collect();
            return vec![(tl.clone(), th.clone(), next)];
        }
        let mut cuts = vec![tl.clone(), th.clone()];
        for &i in alive {
            let r = &self.rects[i as usize];
            for v in [&r.lo[coord], &r.hi[coord]] {
                if tl < v && v < th {
                    cuts.push(v.clone());
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("comparable scalars"));
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let next = alive
                    .iter()
                    .copied()
                    .filter(|&i| {
                        let r = &self.rects[i as usize];
                        r.lo[coord] <= w[0] && w[1] <= r.hi[coord]
                    })
                    .collect();
                (w[0].clone(), w[1].clone(), next)
            })
            .collect()
    }

    fn spans_rest(&self, coord: usize, i: u32) -> bool {
        let r = &self.rects[i as usize];
        (coord..self.target.dims()).all(|c| r.lo[c] <= self.target.lo[c] && self.target.hi[c] <= r.hi[c])
    }

    fn covered(&self, coord: usize, alive: Vec<u32>, memo: &mut HashMap<(usize, Vec<u32>), bool>) -> bool {
        if alive.is_empty() {
            return false;
        }
        if coord == self.target.dims() || alive.iter().any(|&i| self.spans_rest(coord, i)) {
            return true;
        }
        if let Some(&known) = memo.get(&(coord, alive.clone())) {
            return known;
        }
        let result = self
            .cells(coord, &alive)
            .into_iter()
            .all(|(_, _, next)| self.covered(coord + 1, next, memo));
        memo.insert((coord, alive), result);
        result
    }

    fn measure(&self, coord: usize, alive: Vec<u32>, memo: &mut HashMap<(usize, Vec<u32>), S>) -> S {
        if alive.is_empty() {
            return S::zero();
        }
        if coord == self.target.dims() {
            return S::one();
        }
        if let Some(known) = memo.get(&(coord, alive.clone())) {
            return known.clone();
        }
        let mut total = S::zero();
        for (lo, hi, next) in self.cells(coord, &alive) {
            let width = hi - lo;
            if width.is_zero() {
                continue;
            }
            total = total + width * self.measure(coord + 1, next, memo);
        }
        memo.insert((coord, alive), total.clone());
        total
    }
}

fn touching<S: Scalar>(target: &Rect<S>, rects: &[Rect<S>]) -> Vec<u32> {
    (0..rects.len() as u32)
        .filter(|&i| {
            let r = &rects[i as usize];
            !r.is_empty() && (0..target.dims()).all(|c| r.lo[c] <= target.hi[c] && target.lo[c] <= r.hi[c])
        })
        .collect()
}

/// Whether `target` lies inside the union of `rects`.
pub fn covers<S: Scalar>(target: &Rect<S>, rects: &[Rect<S>]) -> bool {
    if target.is_empty() {
        return true;
    }
    let sweep = Sweep { target, rects };
    sweep.covered(0, touching(target, rects), &mut HashMap::new())
}

/// Lebesgue measure of the union.
pub fn union_measure<S: Scalar>(rects: &[Rect<S>]) -> S {
    let rects: Vec<Rect<S>> = rects.iter().filter(|r| !r.is_empty()).cloned().collect();
    let Some(target) = bounding_box(&rects) else {
        return S::zero();
    };
    let sweep = Sweep { target: &target, rects: &rects };
    sweep.measure(0, (0..rects.len() as u32).collect(), &mut HashMap::new())
}

/// Measure of `(union a) ∩ (union b)`.
pub fn intersection_measure<S: Scalar>(a: &[Rect<S>], b: &[Rect<S>]) -> S {
    let pieces: Vec<Rect<S>> = a.iter().flat_map(|x| b.iter().filter_map(move |y| x.intersect(y))).collect();
    union_measure(&pieces)
}

/// Candidate distances at which the directed distance from `a` to `b` can be
/// attained: `|a_c - e|` for a bound `a_c` of `a` and a bound `e` of some box
/// of `b`, and half-gaps `(lo_j - hi_k) / 2` between boxes of `b`.
///
/// The optimum of `max_{p in a} min_j d(p, b_j)` sits at a vertex of the
/// arrangement cut out by equations `lo_jc - p_c = v`, `p_c - hi_kc = v`.
/// A coordinate pinned to a bound of `a` gives the first form; a free
/// coordinate balanced between two boxes gives the second.
fn candidates<S: Scalar>(a: &Rect<S>, b: &[Rect<S>]) -> Vec<S> {
    let mut out = vec![S::zero()];
    for c in 0..a.dims() {
        let mut lows: Vec<&S> = b.iter().map(|r| &r.lo[c]).collect();
        let mut highs: Vec<&S> = b.iter().map(|r| &r.hi[c]).collect();
        let by = |x: &&S, y: &&S| x.partial_cmp(y).expect("comparable scalars");
        lows.sort_by(by);
        lows.dedup();
        highs.sort_by(by);
        highs.dedup();
        for e in lows.iter().chain(&highs) {
            for p in [&a.lo[c], &a.hi[c]] {
                out.push((p.clone() - (*e).clone()).abs());
            }
        }
        for l in &lows {
            for h in &highs {
                let gap = (*l).clone() - (*h).clone();
                if gap.is_positive() {
                    out.push(gap / S::from_i64(2).expect("two"));
                }
            }
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).expect("comparable scalars"));
    out.dedup();
    out
}

/// `sup_{p in a} inf_{q in union b} |p - q|_∞`; `None` when `b` is empty.
pub fn box_to_union_distance<S: Scalar>(a: &Rect<S>, b: &[Rect<S>]) -> Option<S> {
    if a.is_empty() {
        return Some(S::zero());
    }
    let b: Vec<Rect<S>> = b.iter().filter(|r| !r.is_empty()).cloned().collect();
    if b.is_empty() {
        return None;
    }
    let cands = candidates(a, &b);
    let fits = |eps: &S| {
        let inflated: Vec<Rect<S>> = b.iter().map(|r| r.inflate(eps)).collect();
        covers(a, &inflated)
    };
    // The last candidate always fits: it is at least the distance from any
    // corner of `a` to the far side of a box of `b`.
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    debug_assert!(fits(&cands[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if fits(&cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(cands[lo].clone())
}

/// Directed L∞ Hausdorff distance between unions of boxes; `None` when `a`
/// is nonempty and `b` is empty.
pub fn directed_hausdorff<S: Scalar>(a: &[Rect<S>], b: &[Rect<S>]) -> Option<S> {
    let mut worst = S::zero();
    for rect in a.iter().filter(|r| !r.is_empty()) {
        worst = smax(worst, box_to_union_distance(rect, b)?);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(lo: &[f64], hi: &[f64]) -> Rect<f64> {
        Rect::new(lo.to_vec(), hi.to_vec())
    }

    #[test]
    fn measure_of_overlapping_boxes() {
        assert_eq!(union_measure(&[r(&[0.0, 0.0], &[2.0, 1.0]), r(&[1.0, 0.0], &[3.0, 1.0])]), 3.0);
        assert_eq!(union_measure(&[r(&[0.0], &[1.0]), r(&[5.0], &[6.0])]), 2.0);
        let q = |s: &str| Rational::parse_decimal(s).unwrap();
        let band = Rect::new(vec![q("0"), q("0.2")], vec![q("20"), q("0.4")]);
        assert_eq!(union_measure(&[band]), q("4"));
        assert_eq!(union_measure::<f64>(&[]), 0.0);
        let nested = [r(&[0.0, 0.0, 0.0], &[2.0, 2.0, 2.0]), r(&[0.5, 0.5, 0.5], &[1.0, 1.0, 1.0])];
        assert_eq!(union_measure(&nested), 8.0);
    }

    #[test]
    fn coverage_respects_closed_faces() {
        let target = r(&[0.0, 0.0], &[2.0, 1.0]);
        let halves = [r(&[0.0, 0.0], &[1.0, 1.0]), r(&[1.0, 0.0], &[2.0, 1.0])];
        assert!(covers(&target, &halves));
        let gap = [r(&[0.0, 0.0], &[0.9, 1.0]), r(&[1.0, 0.0], &[2.0, 1.0])];
        assert!(!covers(&target, &gap));
        let line = r(&[1.0, 0.0], &[1.0, 1.0]);
        assert!(covers(&line, &halves[..1]));
        assert!(!covers(&r(&[1.5, 0.5], &[1.5, 0.5]), &halves[..1]));
    }

    #[test]
    fn hausdorff_between_bands() {
        let q = |s: &str| Rational::parse_decimal(s).unwrap();
        let band = |lo: &str, hi: &str| Rect::new(vec![q(lo); 3], vec![q(hi); 3]);
        let narrow = [band("0.2", "0.4")];
        let wide = [band("0.2", "0.44")];
        assert_eq!(directed_hausdorff(&wide, &narrow), Some(q("0.04")));
        assert_eq!(directed_hausdorff(&narrow, &wide), Some(q("0")));
        let full = [band("0", "1")];
        assert_eq!(directed_hausdorff(&full, &narrow), Some(q("0.6")));
        assert_eq!(directed_hausdorff(&narrow, &[]), None);
    }

    #[test]
    fn hausdorff_needs_midpoints() {
        // The point 0.5 is 0.5 away from both [-1, 0] and [1, 2].
        let a = [r(&[0.0], &[1.0])];
        let b = [r(&[-1.0], &[0.0]), r(&[1.0], &[2.0])];
        assert_eq!(directed_hausdorff(&a, &b), Some(0.5));
    }
}

//! Sampling from explicit languages and grid estimates of the time
//! projection `P(L) = ∪_s ∪_t {(s_t, τ) | t ≤ τ ≤ t + 1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::language::{language_with_budget, LanguageBoxUnion};
use crate::aos::TimeWindow;
use crate::error::{Error, Result, Side};
use crate::formula::Formula;
use crate::geometry::Rect;
use crate::scalar::Scalar;
use crate::trace::{Domain, Trace};

/// Deterministic traces drawn from the union: a box is picked uniformly,
/// then every coordinate is `lo + (hi - lo) k / 1000` for a uniform `k`.
pub fn sample_satisfying<S: Scalar>(lang: &LanguageBoxUnion<S>, count: usize, seed: u64) -> Result<Vec<Trace<S>>> {
    if lang.is_empty() {
        return Err(Error::EmptyLanguage(Side::First));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = lang.dims();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let b = &lang.boxes()[rng.gen_range(0..lang.len())];
        let rows = (0..=lang.last_time())
            .map(|t| {
                (0..n)
                    .map(|d| {
                        let c = lang.coordinate(t, d);
                        let (lo, hi) = (&b.lo[c].value, &b.hi[c].value);
                        let k = rng.gen_range(0..=1000);
                        lo.clone() + (hi.clone() - lo.clone()) * S::from_ratio(k, 1000)
                    })
                    .collect()
            })
            .collect();
        out.push(Trace::new(rows, lang.domain().clone())?);
    }
    Ok(out)
}

/// Value-space projection of the language at time `t`, with contained
/// rectangles dropped.
fn slice_at<S: Scalar>(lang: &LanguageBoxUnion<S>, t: usize) -> Vec<Rect<S>> {
    let n = lang.dims();
    let mut rects: Vec<Rect<S>> = Vec::new();
    for b in lang.boxes() {
        let c = lang.coordinate(t, 0);
        let r = Rect::new(
            b.lo[c..c + n].iter().map(|x| x.value.clone()).collect(),
            b.hi[c..c + n].iter().map(|x| x.value.clone()).collect(),
        );
        if rects.iter().any(|o| o.contains(&r)) {
            continue;
        }
        rects.retain(|o| !r.contains(o));
        rects.push(r);
    }
    rects
}

fn cell_center<S: Scalar>(lo: &S, hi: &S, index: usize, cells: usize) -> S {
    let frac = S::from_ratio(2 * index as i64 + 1, 2 * cells as i64);
    lo.clone() + (hi.clone() - lo.clone()) * frac
}

/// Estimate with `cells` cells per dimension: cells whose center lies in the
/// slice, summed over the unit windows.
fn estimate<S: Scalar>(slices: &[Vec<Rect<S>>], domain: &Domain<S>, cells: usize) -> S {
    let n = domain.dims();
    let cell_volume = (0..n).fold(S::one(), |acc, d| {
        acc * (domain.hi(d).clone() - domain.lo(d).clone()) / S::from_usize(cells).expect("cell count fits")
    });
    let centers: Vec<Vec<S>> =
        (0..n).map(|d| (0..cells).map(|i| cell_center(domain.lo(d), domain.hi(d), i, cells)).collect()).collect();
    let mut hits = 0usize;
    let mut index = vec![0usize; n];
    for slice in slices {
        index.iter_mut().for_each(|i| *i = 0);
        loop {
            let point: Vec<S> = index.iter().enumerate().map(|(d, i)| centers[d][*i].clone()).collect();
            if slice.iter().any(|r| r.contains_point(&point)) {
                hits += 1;
            }
            let mut d = 0;
            while d < n {
                index[d] += 1;
                if index[d] < cells {
                    break;
                }
                index[d] = 0;
                d += 1;
            }
            if d == n {
                break;
            }
        }
    }
    cell_volume * S::from_usize(hits).expect("hit count fits")
}

/// Grid estimate of the measure of `P(L(f))`, refined by doubling the cells
/// per dimension until two successive estimates differ by less than
/// `resolution`.
///
/// `Literal` counts the windows `[t, t + 1]` for `t < T`; `Extended` also
/// counts `[T, T + 1]`.
pub fn grid_projection_measure<S: Scalar>(
    f: &Formula<S>,
    domain: &Domain<S>,
    last_time: usize,
    window: TimeWindow,
    resolution: &S,
    budget: usize,
) -> Result<S> {
    if domain.dims() > 2 {
        return Err(Error::InvalidConfig("grid projection supports at most two dimensions".into()));
    }
    if !resolution.is_positive() {
        return Err(Error::InvalidConfig("resolution must be positive".into()));
    }
    let lang = language_with_budget(f, domain, last_time, budget)?;
    let times = match window {
        TimeWindow::Literal => last_time,
        TimeWindow::Extended => last_time + 1,
    };
    let slices: Vec<Vec<Rect<S>>> = (0..times).map(|t| slice_at(&lang, t)).collect();
    let work = |cells: usize| {
        let per_slice: usize = slices.iter().map(|s| s.len().max(1)).sum();
        cells.checked_pow(domain.dims() as u32).and_then(|c| c.checked_mul(per_slice))
    };
    let mut cells = 8;
    let mut previous = estimate(&slices, domain, cells);
    loop {
        cells *= 2;
        if work(cells).is_none_or(|w| w > budget.saturating_mul(64)) {
            return Err(Error::BudgetExceeded { what: "grid cell", limit: budget.saturating_mul(64) });
        }
        let current = estimate(&slices, domain, cells);
        if (current.clone() - previous).abs() < *resolution {
            return Ok(current);
        }
        previous = current;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::language::{language, DEFAULT_BOX_BUDGET};
    use crate::parser::parse_formula;
    use crate::robustness::satisfies;

    fn f(text: &str) -> Formula<f64> {
        parse_formula(text, 1).unwrap()
    }

    #[test]
    fn samples_satisfy_the_formula() {
        let domain = Domain::unit(1);
        let phi5 = f("G[0,10](x1 >= 0.2 & x1 <= 0.4) & G[12,20](x1 >= 0.2 & x1 <= 0.44)");
        let lang = language(&phi5, &domain, 20).unwrap();
        let traces = sample_satisfying(&lang, 100, 7).unwrap();
        assert_eq!(traces.len(), 100);
        assert!(traces.iter().all(|s| satisfies(s, &phi5).unwrap()));
        assert_eq!(traces, sample_satisfying(&lang, 100, 7).unwrap());
        let empty = language(&f("x1 >= 0.5 & x1 <= 0.4"), &domain, 0).unwrap();
        assert!(matches!(sample_satisfying(&empty, 1, 0), Err(Error::EmptyLanguage(_))));
    }

    #[test]
    fn projection_measures() {
        let domain = Domain::unit(1);
        let m = |text: &str, window| {
            grid_projection_measure(&f(text), &domain, 20, window, &1e-3, DEFAULT_BOX_BUDGET).unwrap()
        };
        assert!((m("G[0,20](x1 >= 0.2 & x1 <= 0.4)", TimeWindow::Literal) - 4.0).abs() < 1e-3);
        assert_eq!(m("T", TimeWindow::Literal), 20.0);
        assert_eq!(m("T", TimeWindow::Extended), 21.0);
        let phi5 = "G[0,10](x1 >= 0.2 & x1 <= 0.4) & G[12,20](x1 >= 0.2 & x1 <= 0.44)";
        assert!((m(phi5, TimeWindow::Literal) - 5.12).abs() < 1e-3);
    }
}

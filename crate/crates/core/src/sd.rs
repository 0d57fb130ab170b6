//! Symmetric-difference distance between box expressions.

use crate::aos::{aos, intersection_area, union_area, AosConfig, BoxExpr, SpaceTimeBox};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::rewrite::to_nnf;
use crate::scalar::Scalar;

/// Cap on resolution pairs compared by one distance call.
pub const PAIR_BUDGET: usize = 1 << 24;

/// Divisor turning an area into a distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalizer {
    /// `T`, the length of `[0, T]`.
    #[default]
    Horizon,
    /// `T + 1`, for sample windows `[t, t + 1]`.
    HorizonPlusOne,
}

impl Normalizer {
    pub fn value<S: Scalar>(self, horizon: &S) -> S {
        match self {
            Normalizer::Horizon => horizon.clone(),
            Normalizer::HorizonPlusOne => horizon.clone() + S::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdResult<S> {
    pub distance: S,
    /// Resolution indices (depth-first order) attaining the minimum.
    pub resolutions: (usize, usize),
    pub area_1: S,
    pub area_2: S,
    pub overlap: S,
    pub normalizer: S,
}

/// Minimum over resolution pairs of `(|A| + |B| - 2 |A ∩ B|) / normalizer`.
pub fn sd_boxsets<S: Scalar>(
    b1: &BoxExpr<S>,
    b2: &BoxExpr<S>,
    dims: usize,
    horizon: &S,
    normalizer: Normalizer,
) -> Result<SdResult<S>> {
    let norm = normalizer.value(horizon);
    if !norm.is_positive() {
        return Err(Error::InvalidConfig("distance normalizer must be positive".into()));
    }
    check_dims(b1, dims)?;
    check_dims(b2, dims)?;
    if b1.resolution_count().saturating_mul(b2.resolution_count()) > PAIR_BUDGET {
        return Err(Error::BudgetExceeded { what: "resolution pair", limit: PAIR_BUDGET });
    }
    let areas_2: Vec<S> = b2.resolutions().map(|r| union_area(r, dims)).collect();
    let mut best: Option<SdResult<S>> = None;
    for (i, r1) in b1.resolutions().enumerate() {
        let a1 = union_area(r1, dims);
        for (j, r2) in b2.resolutions().enumerate() {
            let a2 = areas_2[j].clone();
            let ov = intersection_area(r1, r2, dims);
            let two = S::from_i64(2).expect("two");
            let distance = (a1.clone() + a2.clone() - two * ov.clone()) / norm.clone();
            if best.as_ref().is_none_or(|b| distance < b.distance) {
                best = Some(SdResult {
                    distance,
                    resolutions: (i, j),
                    area_1: a1.clone(),
                    area_2: a2,
                    overlap: ov,
                    normalizer: norm.clone(),
                });
            }
        }
    }
    Ok(best.expect("every expression has a resolution"))
}

/// Distance between two formulae; negations are pushed onto predicates first.
pub fn sd<S: Scalar>(f1: &Formula<S>, f2: &Formula<S>, cfg: &AosConfig<S>, normalizer: Normalizer) -> Result<SdResult<S>> {
    let b1 = aos(&to_nnf(f1), cfg)?;
    let b2 = aos(&to_nnf(f2), cfg)?;
    sd_boxsets(&b1, &b2, cfg.dims(), &cfg.horizon, normalizer)
}

fn check_dims<S: Scalar>(e: &BoxExpr<S>, dims: usize) -> Result<()> {
    for leaf in e.resolutions() {
        if let Some(d) = leaf.iter().flat_map(|b| b.ranges.keys()).find(|d| **d >= dims) {
            return Err(Error::DimensionMismatch(format!("box constrains dimension {} of {dims}", d + 1)));
        }
    }
    Ok(())
}

/// Union of box expressions: every combination of resolutions, concatenated.
pub fn union_boxexpr<S: Scalar>(exprs: &[BoxExpr<S>], dims: usize, budget: usize) -> Result<BoxExpr<S>> {
    let mut acc = BoxExpr::Leaf(Vec::new());
    for e in exprs {
        check_dims(e, dims)?;
        if acc.resolution_count().saturating_mul(e.resolution_count()) > budget {
            return Err(Error::BudgetExceeded { what: "choice resolution", limit: budget });
        }
        acc = acc.zip_with(e, &|a, b| {
            let mut out: Vec<SpaceTimeBox<S>> = a.to_vec();
            for x in b {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            out
        });
    }
    Ok(acc)
}

//! Pompeiu-Hausdorff distance between formula languages.
//!
//! The directed distance `sup_{s |= f1} inf_{s' |= f2} |s - s'|_∞` is the
//! optimum of `max ε` subject to `s |= f1` and `s` violating `f2` relaxed by
//! `ε`. Both constraints are unions over the branches of their formula, so
//! the program splits into one MILP per pair of branches and the optimum is
//! the largest piece optimum. Small pieces keep the LP relaxations tight.

use crate::aos::{slice, time_cuts, BoxExpr, SpaceTimeBox};
use crate::error::{Error, Result, Side};
use crate::geometry::{directed_hausdorff, Rect};
use crate::formula::Formula;
use crate::milp::{
    build_feasibility_program, build_ph_piece, build_trace_distance_program, solve, Encoding, MilpSolution,
    SolverConfig, Status, TraceVars,
};
use crate::rewrite::{disjuncts, negate, to_nnf};
use crate::scalar::{smax, Scalar};
use crate::sd::PAIR_BUDGET;
use crate::trace::{Domain, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhConfig {
    pub encoding: Encoding,
    pub solver: SolverConfig,
    /// Most branches each side is split into; 1 solves one monolithic MILP.
    pub split_limit: usize,
}

impl Default for PhConfig {
    fn default() -> Self {
        PhConfig { encoding: Encoding::Implication, solver: SolverConfig::default(), split_limit: 64 }
    }
}

/// Directed distance with the signal attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Directed<S> {
    pub value: S,
    /// Satisfies the source formula; `None` when the value is 0 because the
    /// first language lies inside the second.
    pub witness: Option<Trace<S>>,
    pub milps: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhResult<S> {
    pub directed_12: S,
    pub directed_21: S,
    pub undirected: S,
    /// Witness of the larger direction; it satisfies that direction's source.
    pub witness: Option<(Side, Trace<S>)>,
}

fn check_dims<S: Scalar>(f: &Formula<S>, domain: &Domain<S>) -> Result<()> {
    match f.max_dim() {
        Some(d) if d >= domain.dims() => Err(Error::DimensionOutOfRange { index: d + 1, dims: domain.dims() }),
        _ => Ok(()),
    }
}

fn extract<S: Scalar>(sol: &MilpSolution<S>, x: &TraceVars, domain: &Domain<S>) -> Result<Trace<S>> {
    let rows = x.rows().iter().map(|row| row.iter().map(|v| sol.values[v.0].clone()).collect()).collect();
    Trace::new(rows, domain.clone())
}

/// Whether `L(f)` over `[0, last_time]` is nonempty.
pub fn is_satisfiable<S: Scalar>(f: &Formula<S>, domain: &Domain<S>, last_time: usize, config: &PhConfig) -> Result<bool> {
    check_dims(f, domain)?;
    for piece in disjuncts(&to_nnf(f), config.split_limit) {
        let (model, _) = build_feasibility_program(&piece, domain, last_time, config.encoding)?;
        if solve(&model, &config.solver)?.status == Status::Optimal {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn directed_ph<S: Scalar>(
    f1: &Formula<S>,
    f2: &Formula<S>,
    domain: &Domain<S>,
    last_time: usize,
    config: &PhConfig,
) -> Result<Directed<S>> {
    check_dims(f1, domain)?;
    check_dims(f2, domain)?;
    for f in [f1, f2] {
        if f.horizon() > last_time {
            return Err(Error::HorizonExceeded { horizon: f.horizon(), bound: last_time });
        }
    }
    if !is_satisfiable(f1, domain, last_time, config)? {
        return Err(Error::EmptyLanguage(Side::First));
    }
    let sources = disjuncts(&to_nnf(f1), config.split_limit);
    let violations = disjuncts(&negate(f2), config.split_limit);
    let mut best: Option<(S, Trace<S>)> = None;
    let (mut milps, mut nodes) = (0, 0);
    for a in &sources {
        for b in &violations {
            // Only pieces that can beat the incumbent matter.
            let floor = best.as_ref().map_or(S::zero(), |(v, _)| v.clone());
            let program = build_ph_piece(a, b, domain, last_time, config.encoding, floor)?;
            let sol = solve(&program.model, &config.solver)?;
            milps += 1;
            nodes += sol.nodes;
            let Some(value) = sol.objective.clone() else { continue };
            if best.as_ref().map_or(true, |(v, _)| value > *v) {
                best = Some((value, extract(&sol, &program.trace, domain)?));
            }
        }
    }
    Ok(match best {
        Some((value, witness)) if value.is_positive() => Directed { value, witness: Some(witness), milps, nodes },
        _ => Directed { value: S::zero(), witness: None, milps, nodes },
    })
}

pub fn ph<S: Scalar>(
    f1: &Formula<S>,
    f2: &Formula<S>,
    domain: &Domain<S>,
    last_time: usize,
    config: &PhConfig,
) -> Result<PhResult<S>> {
    let forward = directed_ph(f1, f2, domain, last_time, config)?;
    let backward = directed_ph(f2, f1, domain, last_time, config).map_err(|e| match e {
        Error::EmptyLanguage(Side::First) => Error::EmptyLanguage(Side::Second),
        other => other,
    })?;
    let (undirected, witness) = if backward.value > forward.value {
        (backward.value.clone(), backward.witness.map(|w| (Side::Second, w)))
    } else {
        (forward.value.clone(), forward.witness.map(|w| (Side::First, w)))
    };
    Ok(PhResult { directed_12: forward.value, directed_21: backward.value, undirected, witness })
}

/// `min_{s' |= f} |s - s'|_∞` with the minimizing signal.
pub fn trace_to_formula_distance<S: Scalar>(s: &Trace<S>, f: &Formula<S>, config: &PhConfig) -> Result<(S, Trace<S>)> {
    check_dims(f, s.domain())?;
    if f.horizon() > s.last_time() {
        return Err(Error::TraceTooShort { required: f.horizon(), available: s.last_time() });
    }
    let mut best: Option<(S, Trace<S>)> = None;
    for piece in disjuncts(&to_nnf(f), config.split_limit) {
        let (mut model, y, delta) = build_trace_distance_program(s, &piece, config.encoding)?;
        if let Some((v, _)) = &best {
            model.variables[delta.0].upper = v.clone();
        }
        let sol = solve(&model, &config.solver)?;
        if let Some(value) = sol.objective.clone() {
            if best.as_ref().map_or(true, |(v, _)| value < *v) {
                best = Some((value, extract(&sol, &y, s.domain())?));
            }
        }
    }
    best.ok_or(Error::EmptyLanguage(Side::Second))
}

/// How a pair of box sets is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoxDistanceMode {
    /// Largest Hausdorff distance between value slices at equal times.
    #[default]
    Slice,
    /// Hausdorff distance between the boxes with time scaled by `1 / T`.
    Normalized,
}

fn hausdorff<S: Scalar>(a: &[Rect<S>], b: &[Rect<S>]) -> S {
    let ab = directed_hausdorff(a, b).expect("both sides nonempty");
    let ba = directed_hausdorff(b, a).expect("both sides nonempty");
    smax(ab, ba)
}

fn resolution_distance<S: Scalar>(
    r1: &[SpaceTimeBox<S>],
    r2: &[SpaceTimeBox<S>],
    dims: usize,
    horizon: &S,
    mode: BoxDistanceMode,
) -> S {
    match mode {
        BoxDistanceMode::Slice => {
            let mut cuts = vec![S::zero(), horizon.clone()];
            cuts.extend(time_cuts(r1));
            cuts.extend(time_cuts(r2));
            cuts.retain(|c| !c.is_negative() && c <= horizon);
            cuts.sort_by(|a, b| a.partial_cmp(b).expect("comparable scalars"));
            cuts.dedup();
            let mut spans: Vec<(S, S)> = cuts.iter().map(|c| (c.clone(), c.clone())).collect();
            spans.extend(cuts.windows(2).map(|w| (w[0].clone(), w[1].clone())));
            spans
                .iter()
                .map(|(a, b)| hausdorff(&slice(r1, a, b, dims), &slice(r2, a, b, dims)))
                .fold(S::zero(), smax)
        }
        BoxDistanceMode::Normalized => {
            let scaled = |r: &[SpaceTimeBox<S>]| -> Vec<Rect<S>> {
                r.iter()
                    .map(|b| {
                        let mut rect = b.to_rect(dims);
                        rect.lo[0] = rect.lo[0].clone() / horizon.clone();
                        rect.hi[0] = rect.hi[0].clone() / horizon.clone();
                        rect
                    })
                    .collect()
            };
            hausdorff(&scaled(r1), &scaled(r2))
        }
    }
}

/// Hausdorff distance between box expressions, minimized over resolution
/// pairs. Resolutions with no boxes are unsatisfiable and skipped.
pub fn ph_boxsets<S: Scalar>(
    b1: &BoxExpr<S>,
    b2: &BoxExpr<S>,
    dims: usize,
    horizon: &S,
    mode: BoxDistanceMode,
) -> Result<S> {
    if !horizon.is_positive() {
        return Err(Error::InvalidConfig("horizon must be positive".into()));
    }
    if b1.resolution_count().saturating_mul(b2.resolution_count()) > PAIR_BUDGET {
        return Err(Error::BudgetExceeded { what: "resolution pair", limit: PAIR_BUDGET });
    }
    fn side<S: Scalar>(e: &BoxExpr<S>, which: Side) -> Result<Vec<&[SpaceTimeBox<S>]>> {
        let rs: Vec<&[SpaceTimeBox<S>]> = e.resolutions().filter(|r| !r.is_empty()).collect();
        if rs.is_empty() {
            Err(Error::EmptyLanguage(which))
        } else {
            Ok(rs)
        }
    }
    let (rs1, rs2) = (side(b1, Side::First)?, side(b2, Side::Second)?);
    let mut best: Option<S> = None;
    for r1 in &rs1 {
        for r2 in &rs2 {
            let d = resolution_distance(r1, r2, dims, horizon, mode);
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
    }
    Ok(best.expect("nonempty sides"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::robustness::robustness;
    use crate::scalar::Rational;

    fn f(text: &str) -> Formula<Rational> {
        parse_formula(text, 1).unwrap()
    }

    fn q(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    const THETA1: &str = "(x1 >= 0.2 & x1 <= 0.4)";

    fn dph(a: &str, b: &str) -> Directed<Rational> {
        directed_ph(&f(a), &f(b), &Domain::unit(1), 20, &PhConfig::default()).unwrap()
    }

    #[test]
    fn directed_examples() {
        let phi1 = format!("G[0,20]{THETA1}");
        let top = dph("T", &phi1);
        assert_eq!(top.value, q("0.6"));
        let w = top.witness.unwrap();
        assert!(robustness(&w, &f(&phi1), 0).unwrap().finite().unwrap() <= &-q("0.6"));
        assert_eq!(dph(&format!("G[0,16] F[0,4] {THETA1}"), &format!("G[0,16] F[0,4] {THETA1}")).value, q("0"));
        assert_eq!(dph(&format!("F[0,20]{THETA1}"), &format!("F[0,20]{THETA1}")).value, q("0"));
    }

    #[test]
    fn monolithic_and_split_agree() {
        let mono = PhConfig { split_limit: 1, ..PhConfig::default() };
        let pairs = [("G[0,20](x1 >= 0.2 & x1 <= 0.44)", "G[0,20](x1 >= 0.2 & x1 <= 0.4)"), ("T", "F[0,20](x1 >= 0.2 & x1 <= 0.4)")];
        for (a, b) in pairs {
            let split = directed_ph(&f(a), &f(b), &Domain::unit(1), 20, &PhConfig::default()).unwrap();
            let whole = directed_ph(&f(a), &f(b), &Domain::unit(1), 20, &mono).unwrap();
            assert_eq!(split.value, whole.value, "{a} vs {b}");
        }
    }

    #[test]
    fn empty_languages_are_reported() {
        let empty = "x1 >= 0.5 & x1 <= 0.4";
        let err = directed_ph(&f(empty), &f("T"), &Domain::unit(1), 20, &PhConfig::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyLanguage(Side::First)));
        let err = ph(&f("T"), &f(empty), &Domain::unit(1), 20, &PhConfig::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyLanguage(Side::Second)));
    }

    #[test]
    fn trace_distances() {
        let phi1 = f(&format!("G[0,20]{THETA1}"));
        let s1 = Trace::scalar((0..=20).map(|_| q("0.3"))).unwrap();
        assert_eq!(trace_to_formula_distance(&s1, &phi1, &PhConfig::default()).unwrap().0, q("0"));
        let s2 = Trace::scalar((0..=20).map(|t| Rational::from_ratio(t, 20))).unwrap();
        let (d, nearest) = trace_to_formula_distance(&s2, &phi1, &PhConfig::default()).unwrap();
        assert_eq!(d, q("0.6"));
        assert!(robustness(&nearest, &phi1, 0).unwrap().satisfied());
        let flat = Trace::scalar((0..=20).map(|_| q("0.45"))).unwrap();
        let phi2 = f("G[0,20](x1 >= 0.2 & x1 <= 0.44)");
        assert_eq!(trace_to_formula_distance(&flat, &phi2, &PhConfig::default()).unwrap().0, q("0.01"));
    }
    #[test]
    fn box_set_distances() {
        use crate::aos::{aos, AosConfig};
        let cfg = AosConfig::unit(1, 20);
        let b = |text: &str| aos(&f(text), &cfg).unwrap();
        let phi1 = b("G[0,20](x1 >= 0.2 & x1 <= 0.4)");
        let phi2 = b("G[0,20](x1 >= 0.2 & x1 <= 0.44)");
        let phi5 = b("G[0,10](x1 >= 0.2 & x1 <= 0.4) & G[12,20](x1 >= 0.2 & x1 <= 0.44)");
        let t = q("20");
        assert_eq!(ph_boxsets(&phi1, &phi2, 1, &t, BoxDistanceMode::Slice).unwrap(), q("0.04"));
        assert_eq!(ph_boxsets(&phi1, &phi5, 1, &t, BoxDistanceMode::Slice).unwrap(), q("0.6"));
        assert_eq!(ph_boxsets(&phi1, &phi1, 1, &t, BoxDistanceMode::Normalized).unwrap(), q("0"));
        assert_eq!(ph_boxsets(&phi1, &phi5, 1, &t, BoxDistanceMode::Normalized).unwrap(), q("0.05"));
        let none = b("x1 >= 2");
        assert!(matches!(ph_boxsets(&none, &phi1, 1, &t, BoxDistanceMode::Slice), Err(Error::EmptyLanguage(Side::First))));
    }
}

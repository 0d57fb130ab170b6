//! Complete programs: directed PH, language emptiness and trace distance.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::milp::encode::{encode_satisfaction, Encoder, Encoding, Polarity, TraceVars};
use crate::milp::model::{MilpModel, Relation, Sense, VarId};
use crate::rewrite::{negate, to_nnf};
use crate::scalar::Scalar;
use crate::trace::{Domain, Trace};

/// `max ε` subject to `s |= f1`, `s` violating `relax(f2, ε)`, `s` in the domain.
#[derive(Debug, Clone)]
pub struct PhProgram<S> {
    pub model: MilpModel<S>,
    pub trace: TraceVars,
    pub eps: VarId,
}

fn check_horizon<S: Scalar>(f: &Formula<S>, last_time: usize) -> Result<()> {
    if f.horizon() > last_time {
        return Err(Error::HorizonExceeded { horizon: f.horizon(), bound: last_time });
    }
    Ok(())
}

pub fn build_ph_program<S: Scalar>(
    f1: &Formula<S>,
    f2: &Formula<S>,
    domain: &Domain<S>,
    last_time: usize,
    encoding: Encoding,
) -> Result<PhProgram<S>> {
    check_horizon(f1, last_time)?;
    check_horizon(f2, last_time)?;
    build_ph_piece(&to_nnf(f1), &negate(f2), domain, last_time, encoding, S::zero())
}

/// The directed program restricted to one piece of each side: `s |= a` and
/// `s |= b`, where `b` is (part of) the NNF negation of the second formula
/// and its thresholds move inward by `ε`. `ε` ranges over
/// `[eps_floor, diameter]`.
pub fn build_ph_piece<S: Scalar>(
    a: &Formula<S>,
    b: &Formula<S>,
    domain: &Domain<S>,
    last_time: usize,
    encoding: Encoding,
    eps_floor: S,
) -> Result<PhProgram<S>> {
    check_horizon(a, last_time)?;
    check_horizon(b, last_time)?;
    if b.contains_negation() {
        return Err(Error::NegationPresent);
    }
    let mut model = MilpModel::new();
    let trace = TraceVars::add(&mut model, domain, last_time, "x");
    let eps = model.add_continuous("eps", eps_floor, domain.diameter());
    encode_satisfaction(&mut model, a, &trace, Polarity::AssertTrue, None, encoding, "a")?;
    Encoder::new(&mut model, &trace, Some((eps, Polarity::AssertFalse)), encoding, "b").require(b, 0)?;
    model.set_objective(Sense::Maximize, vec![(eps, S::one())]);
    Ok(PhProgram { model, trace, eps })
}

/// Feasible iff `L(f)` is nonempty.
pub fn build_feasibility_program<S: Scalar>(
    f: &Formula<S>,
    domain: &Domain<S>,
    last_time: usize,
    encoding: Encoding,
) -> Result<(MilpModel<S>, TraceVars)> {
    check_horizon(f, last_time)?;
    let mut model = MilpModel::new();
    let trace = TraceVars::add(&mut model, domain, last_time, "x");
    encode_satisfaction(&mut model, &to_nnf(f), &trace, Polarity::AssertTrue, None, encoding, "a")?;
    model.set_objective(Sense::Maximize, Vec::new());
    Ok((model, trace))
}

/// `min δ` subject to `|y - s|_∞ <= δ` and `y |= f`.
pub fn build_trace_distance_program<S: Scalar>(
    s: &Trace<S>,
    f: &Formula<S>,
    encoding: Encoding,
) -> Result<(MilpModel<S>, TraceVars, VarId)> {
    let last_time = s.last_time();
    check_horizon(f, last_time)?;
    let domain = s.domain();
    let mut model = MilpModel::new();
    let trace = TraceVars::add(&mut model, domain, last_time, "y");
    let delta = model.add_continuous("delta", S::zero(), domain.diameter());
    for t in 0..=last_time {
        for d in 0..s.dims() {
            let y = trace.at(t, d);
            let v = s.value(t, d).clone();
            model.add_constraint(format!("u{}_{t}", d + 1), vec![(y, S::one()), (delta, -S::one())], Relation::Le, v.clone());
            model.add_constraint(format!("l{}_{t}", d + 1), vec![(y, S::one()), (delta, S::one())], Relation::Ge, v);
        }
    }
    encode_satisfaction(&mut model, &to_nnf(f), &trace, Polarity::AssertTrue, None, encoding, "a")?;
    model.set_objective(Sense::Minimize, vec![(delta, S::one())]);
    Ok((model, trace, delta))
}

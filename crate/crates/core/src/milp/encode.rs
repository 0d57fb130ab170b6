//! Big-M encoding of negation-free formulae over symbolic traces.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::{Cmp, Formula, Predicate};
use crate::milp::model::{MilpModel, Relation, VarId};
use crate::rewrite::{negate, unroll_until};
use crate::scalar::Scalar;
use crate::trace::Domain;

/// How subformula literals are linked to their children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Encoding {
    /// Only predicates get binaries and a positive literal implies that the
    /// subformula holds. Conjunctions of predicates at one time step share a
    /// binary; connectives above them are continuous in `[0, 1]`. This is
    /// enough because the program only ever needs satisfaction to be implied.
    #[default]
    Implication,
    /// One binary per subformula and time step, equivalent to the
    /// subformula's truth value (closed-inequality convention).
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    AssertTrue,
    AssertFalse,
}

/// Literal attached to a subformula at a time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lit {
    Const(bool),
    Var(VarId),
}

/// Continuous variables `x^{d+1}_t` bounded by the domain.
#[derive(Debug, Clone)]
pub struct TraceVars {
    vars: Vec<Vec<VarId>>,
}

impl TraceVars {
    pub fn add<S: Scalar>(model: &mut MilpModel<S>, domain: &Domain<S>, last_time: usize, prefix: &str) -> Self {
        let vars = (0..=last_time)
            .map(|t| {
                (0..domain.dims())
                    .map(|d| model.add_continuous(format!("{prefix}{}_{t}", d + 1), domain.lo(d).clone(), domain.hi(d).clone()))
                    .collect()
            })
            .collect();
        TraceVars { vars }
    }

    pub fn at(&self, t: usize, dim: usize) -> VarId {
        self.vars[t][dim]
    }

    pub fn last_time(&self) -> usize {
        self.vars.len() - 1
    }

    pub fn dims(&self) -> usize {
        self.vars.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<VarId>] {
        &self.vars
    }
}

/// `terms + constant <= 0`, a predicate in linear form.
struct Linear<S> {
    terms: Vec<(VarId, S)>,
    constant: S,
}

impl<S: Scalar> Linear<S> {
    fn extreme(&self, model: &MilpModel<S>, max: bool) -> S {
        self.terms.iter().fold(self.constant.clone(), |acc, (v, c)| {
            let var = model.var(*v);
            let at = if c.is_positive() == max { &var.upper } else { &var.lower };
            acc + c.clone() * at.clone()
        })
    }
}

/// Encodes formulae into a model, memoizing literals by `(subformula, t)`.
pub struct Encoder<'a, S> {
    model: &'a mut MilpModel<S>,
    x: &'a TraceVars,
    eps: Option<(VarId, Polarity)>,
    encoding: Encoding,
    tag: String,
    memo: HashMap<(String, usize), Lit>,
    counter: usize,
}

impl<'a, S: Scalar> Encoder<'a, S> {
    /// `eps` makes every predicate relaxed by the symbolic `ε`. Its polarity
    /// says whether the encoded formula is the relaxed formula itself or the
    /// negation normal form of its negation. `tag` keeps variable names of
    /// different encoders apart.
    pub fn new(
        model: &'a mut MilpModel<S>,
        x: &'a TraceVars,
        eps: Option<(VarId, Polarity)>,
        encoding: Encoding,
        tag: &str,
    ) -> Self {
        Encoder { model, x, eps, encoding, tag: tag.to_string(), memo: HashMap::new(), counter: 0 }
    }

    fn fresh(&mut self, kind: char) -> String {
        self.counter += 1;
        format!("{kind}{}_{}", self.tag, self.counter)
    }

    fn check_time(&self, f: &Formula<S>, t: usize) -> Result<()> {
        let needed = t + f.horizon();
        if needed > self.x.last_time() {
            return Err(Error::HorizonExceeded { horizon: needed, bound: self.x.last_time() });
        }
        Ok(())
    }

    /// `x - k eps - mu <= 0` for `<=`, `mu + k eps - x <= 0` for `>=`.
    fn linear(&self, p: &Predicate<S>, t: usize) -> Linear<S> {
        let x = self.x.at(t, p.dim);
        let k = match self.eps {
            None => None,
            Some((_, Polarity::AssertTrue)) => Some(if p.cmp == Cmp::Le { S::one() } else { -S::one() }),
            Some((_, Polarity::AssertFalse)) => Some(if p.cmp == Cmp::Le { -S::one() } else { S::one() }),
        };
        let sign = if p.cmp == Cmp::Le { S::one() } else { -S::one() };
        let mut terms = vec![(x, sign.clone())];
        if let (Some((e, _)), Some(k)) = (self.eps, k) {
            terms.push((e, -(sign.clone() * k)));
        }
        Linear { terms, constant: -(sign * p.threshold.clone()) }
    }

    /// Adds `lin <= 0` unconditionally.
    fn hard(&mut self, lin: &Linear<S>) {
        if lin.extreme(self.model, true) <= S::zero() {
            return;
        }
        let name = self.fresh('h');
        self.model.add_constraint(name, lin.terms.clone(), Relation::Le, -lin.constant.clone());
    }

    fn infeasible(&mut self) {
        let name = self.fresh('h');
        self.model.add_constraint(name, Vec::new(), Relation::Ge, S::one());
    }

    /// Adds the constraints making `f` hold at `t`.
    pub fn require(&mut self, f: &Formula<S>, t: usize) -> Result<()> {
        self.check_time(f, t)?;
        if f.contains_negation() {
            return Err(Error::NegationPresent);
        }
        if self.encoding == Encoding::Full {
            return match self.literal(f, t)? {
                Lit::Const(true) => Ok(()),
                Lit::Const(false) => {
                    self.infeasible();
                    Ok(())
                }
                Lit::Var(v) => {
                    let name = self.fresh('r');
                    self.model.add_constraint(name, vec![(v, S::one())], Relation::Eq, S::one());
                    Ok(())
                }
            };
        }
        self.require_implication(f, t)
    }

    fn require_implication(&mut self, f: &Formula<S>, t: usize) -> Result<()> {
        match f {
            Formula::True => {}
            Formula::False => self.infeasible(),
            Formula::Pred(p) => {
                let lin = self.linear(p, t);
                self.hard(&lin);
            }
            Formula::And(a, b) => {
                self.require_implication(a, t)?;
                self.require_implication(b, t)?;
            }
            Formula::Globally(i, inner) => {
                for k in i.steps() {
                    self.require_implication(inner, t + k)?;
                }
            }
            Formula::Or(..) | Formula::Eventually(..) => {
                let mut options = Vec::new();
                collect_disjuncts(f, t, &mut options);
                let mut lits = Vec::new();
                for (g, at) in options {
                    match self.literal(g, at)? {
                        Lit::Const(true) => return Ok(()),
                        Lit::Const(false) => {}
                        Lit::Var(v) => lits.push((v, S::one())),
                    }
                }
                if lits.is_empty() {
                    self.infeasible();
                } else {
                    let name = self.fresh('h');
                    self.model.add_constraint(name, lits, Relation::Ge, S::one());
                }
            }
            Formula::Until(a, i, b) => {
                let unrolled = unroll_until(a, *i, b);
                self.require_implication(&unrolled, t)?;
            }
            Formula::Not(_) => return Err(Error::NegationPresent),
        }
        Ok(())
    }

    /// Literal for `f` at `t`.
    pub fn literal(&mut self, f: &Formula<S>, t: usize) -> Result<Lit> {
        let key = (f.to_string(), t);
        if let Some(lit) = self.memo.get(&key) {
            return Ok(*lit);
        }
        let lit = match self.encoding {
            Encoding::Implication => self.literal_implication(f, t)?,
            Encoding::Full => self.literal_full(f, t)?,
        };
        self.memo.insert(key, lit);
        Ok(lit)
    }

    fn literal_implication(&mut self, f: &Formula<S>, t: usize) -> Result<Lit> {
        Ok(match f {
            Formula::True => Lit::Const(true),
            Formula::False => Lit::Const(false),
            Formula::Pred(p) => self.predicate_group(&[p], t),
            Formula::Not(_) => return Err(Error::NegationPresent),
            Formula::And(..) | Formula::Globally(..) => {
                let mut parts = Vec::new();
                collect_conjuncts(f, t, &mut parts);
                let preds: Vec<&Predicate<S>> = parts
                    .iter()
                    .filter_map(|(g, at)| match g {
                        Formula::Pred(p) if *at == t => Some(p),
                        _ => None,
                    })
                    .collect();
                let mut lits = Vec::new();
                if !preds.is_empty() {
                    lits.push(self.predicate_group(&preds, t));
                }
                for (g, at) in &parts {
                    if !matches!(g, Formula::Pred(_)) || *at != t {
                        lits.push(self.literal(g, *at)?);
                    }
                }
                self.gate(&lits, true)
            }
            Formula::Or(..) | Formula::Eventually(..) => {
                let mut options = Vec::new();
                collect_disjuncts(f, t, &mut options);
                let mut lits = Vec::new();
                for (g, at) in options {
                    lits.push(self.literal(g, at)?);
                }
                self.gate(&lits, false)
            }
            Formula::Until(a, i, b) => {
                let unrolled = unroll_until(a, *i, b);
                self.literal(&unrolled, t)?
            }
        })
    }

    /// One binary implying every predicate of the group at `t`.
    fn predicate_group(&mut self, preds: &[&Predicate<S>], t: usize) -> Lit {
        let mut pending = Vec::new();
        for p in preds {
            let lin = self.linear(p, t);
            let max = lin.extreme(self.model, true);
            if lin.extreme(self.model, false) > S::zero() {
                return Lit::Const(false);
            }
            if max > S::zero() {
                pending.push((lin, max));
            }
        }
        if pending.is_empty() {
            return Lit::Const(true);
        }
        let z = {
            let name = self.fresh('p');
            self.model.add_binary(name)
        };
        for (lin, big_m) in pending {
            debug_assert!(big_m.is_positive(), "big-M must dominate the predicate");
            // lin <= M (1 - z)
            let mut terms = lin.terms;
            terms.push((z, big_m.clone()));
            let name = self.fresh('m');
            self.model.add_constraint(name, terms, Relation::Le, big_m - lin.constant);
        }
        Lit::Var(z)
    }

    /// Continuous gate `y <= l_k` (conjunction) or `y <= sum l_k` (disjunction).
    fn gate(&mut self, lits: &[Lit], conjunction: bool) -> Lit {
        let mut vars = Vec::new();
        for lit in lits {
            match (lit, conjunction) {
                (Lit::Const(false), true) => return Lit::Const(false),
                (Lit::Const(true), false) => return Lit::Const(true),
                (Lit::Const(_), _) => {}
                (Lit::Var(v), _) => {
                    if !vars.contains(v) {
                        vars.push(*v)
                    }
                }
            }
        }
        match vars.len() {
            0 => Lit::Const(conjunction),
            1 => Lit::Var(vars[0]),
            _ => {
                let name = self.fresh(if conjunction { 'a' } else { 'o' });
                let y = self.model.add_continuous(name, S::zero(), S::one());
                if conjunction {
                    for v in vars {
                        let name = self.fresh('c');
                        self.model.add_constraint(name, vec![(y, S::one()), (v, -S::one())], Relation::Le, S::zero());
                    }
                } else {
                    let mut terms = vec![(y, S::one())];
                    terms.extend(vars.into_iter().map(|v| (v, -S::one())));
                    let name = self.fresh('c');
                    self.model.add_constraint(name, terms, Relation::Le, S::zero());
                }
                Lit::Var(y)
            }
        }
    }

    fn literal_full(&mut self, f: &Formula<S>, t: usize) -> Result<Lit> {
        let children: Vec<(&Formula<S>, usize)> = match f {
            Formula::True => return Ok(Lit::Const(true)),
            Formula::False => return Ok(Lit::Const(false)),
            Formula::Not(_) => return Err(Error::NegationPresent),
            Formula::Pred(p) => return Ok(self.predicate_full(p, t)),
            Formula::Until(a, i, b) => {
                let unrolled = unroll_until(a, *i, b);
                return self.literal(&unrolled, t);
            }
            Formula::And(a, b) | Formula::Or(a, b) => vec![(a.as_ref(), t), (b.as_ref(), t)],
            Formula::Globally(i, inner) | Formula::Eventually(i, inner) => {
                i.steps().map(|k| (inner.as_ref(), t + k)).collect()
            }
        };
        let conjunction = matches!(f, Formula::And(..) | Formula::Globally(..));
        let mut vars = Vec::new();
        for (g, at) in children {
            match (self.literal(g, at)?, conjunction) {
                (Lit::Const(false), true) => return Ok(Lit::Const(false)),
                (Lit::Const(true), false) => return Ok(Lit::Const(true)),
                (Lit::Const(_), _) => {}
                (Lit::Var(v), _) => vars.push(v),
            }
        }
        if vars.is_empty() {
            return Ok(Lit::Const(conjunction));
        }
        let z = {
            let name = self.fresh('z');
            self.model.add_binary(name)
        };
        let k = S::from_usize(vars.len()).expect("count fits");
        let mut sum = vec![(z, -S::one())];
        for &v in &vars {
            sum.push((v, S::one()));
            let name = self.fresh('c');
            // conjunction: z <= v; disjunction: z >= v
            let relation = if conjunction { Relation::Le } else { Relation::Ge };
            self.model.add_constraint(name, vec![(z, S::one()), (v, -S::one())], relation, S::zero());
        }
        let name = self.fresh('c');
        if conjunction {
            // sum v - z <= k - 1
            self.model.add_constraint(name, sum, Relation::Le, k - S::one());
        } else {
            // sum v - z >= 0
            self.model.add_constraint(name, sum, Relation::Ge, S::zero());
        }
        Ok(Lit::Var(z))
    }

    /// Binary `z` with `z = 1 => lin <= 0` and `z = 0 => lin >= 0`.
    fn predicate_full(&mut self, p: &Predicate<S>, t: usize) -> Lit {
        let lin = self.linear(p, t);
        let max = lin.extreme(self.model, true);
        let min = lin.extreme(self.model, false);
        let z = {
            let name = self.fresh('p');
            self.model.add_binary(name)
        };
        let mut upper = lin.terms.clone();
        upper.push((z, max.clone()));
        let name = self.fresh('m');
        self.model.add_constraint(name, upper, Relation::Le, max - lin.constant.clone());
        let mut lower = lin.terms.clone();
        lower.push((z, -min));
        let name = self.fresh('m');
        self.model.add_constraint(name, lower, Relation::Ge, -lin.constant);
        Lit::Var(z)
    }
}

/// Flattens nested `&` and `G` into `(conjunct, time)` pairs.
fn collect_conjuncts<'f, S: Scalar>(f: &'f Formula<S>, t: usize, out: &mut Vec<(&'f Formula<S>, usize)>) {
    match f {
        Formula::And(a, b) => {
            collect_conjuncts(a, t, out);
            collect_conjuncts(b, t, out);
        }
        Formula::Globally(i, inner) => {
            for k in i.steps() {
                collect_conjuncts(inner, t + k, out);
            }
        }
        other => out.push((other, t)),
    }
}

/// Flattens nested `|` and `F` into `(disjunct, time)` pairs.
fn collect_disjuncts<'f, S: Scalar>(f: &'f Formula<S>, t: usize, out: &mut Vec<(&'f Formula<S>, usize)>) {
    match f {
        Formula::Or(a, b) => {
            collect_disjuncts(a, t, out);
            collect_disjuncts(b, t, out);
        }
        Formula::Eventually(i, inner) => {
            for k in i.steps() {
                collect_disjuncts(inner, t + k, out);
            }
        }
        other => out.push((other, t)),
    }
}

/// Encodes `f` (assert-true) or its negation (assert-false) at time 0.
///
/// With `eps`, the encoded formula is `relax(f, eps)`; with assert-false,
/// the constraints say the trace violates `relax(f, eps)` in the closed sense.
pub fn encode_satisfaction<S: Scalar>(
    model: &mut MilpModel<S>,
    f: &Formula<S>,
    x: &TraceVars,
    polarity: Polarity,
    eps: Option<VarId>,
    encoding: Encoding,
    tag: &str,
) -> Result<()> {
    if f.contains_negation() {
        return Err(Error::NegationPresent);
    }
    let target = match polarity {
        Polarity::AssertTrue => f.clone(),
        Polarity::AssertFalse => negate(f),
    };
    let mut encoder = Encoder::new(model, x, eps.map(|e| (e, polarity)), encoding, tag);
    encoder.require(&target, 0)
}

/// Checks every predicate big-M: whenever the binary does not require the
/// predicate, the constraint must hold at every corner of the variable box.
pub fn check_big_m<S: Scalar>(model: &MilpModel<S>) -> bool {
    model.constraints.iter().filter(|c| c.name.starts_with('m')).all(|c| {
        let Some((z, coef)) = c.terms.iter().find(|(v, _)| model.var(*v).name.starts_with('p')) else {
            return false;
        };
        let rest = c.terms.iter().filter(|(v, _)| v != z);
        match c.relation {
            Relation::Le => {
                let max = rest.fold(S::zero(), |acc, (v, a)| {
                    let var = model.var(*v);
                    acc + a.clone() * if a.is_positive() { var.upper.clone() } else { var.lower.clone() }
                });
                max <= c.rhs
            }
            Relation::Ge => {
                let min = rest.fold(S::zero(), |acc, (v, a)| {
                    let var = model.var(*v);
                    acc + a.clone() * if a.is_positive() { var.lower.clone() } else { var.upper.clone() }
                });
                min + coef.clone() >= c.rhs
            }
            Relation::Eq => false,
        }
    })
}

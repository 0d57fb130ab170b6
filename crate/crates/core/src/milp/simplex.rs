//! Bounded-variable primal simplex on a dense tableau.
//!
//! Every structural variable is shifted to a zero lower bound and may sit
//! nonbasic at either bound. Rows get a slack (`<=`), a surplus plus an
//! artificial (`>=`) or an artificial (`=`); phase 1 drives the artificials
//! to zero, after which they are frozen at zero. Pricing is Dantzig's rule,
//! switching to Bland's rule after a run of degenerate pivots.

use crate::error::{Error, Result};
use crate::milp::model::Relation;
use crate::scalar::Scalar;

/// Degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 30;

/// Linear program `max c.x` over rows and finite bounds.
#[derive(Debug, Clone)]
pub struct LpProblem<S> {
    pub lower: Vec<S>,
    pub upper: Vec<S>,
    pub rows: Vec<LpRow<S>>,
    pub objective: Vec<S>,
}

#[derive(Debug, Clone)]
pub struct LpRow<S> {
    pub terms: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { values: Vec<S>, objective: S },
    Infeasible,
}

/// Counts pivots across every LP of one branch-and-bound run.
#[derive(Debug, Clone)]
pub struct PivotBudget {
    pub used: usize,
    pub limit: usize,
}

impl PivotBudget {
    pub fn new(limit: usize) -> Self {
        PivotBudget { used: 0, limit }
    }

    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded { what: "simplex pivot", limit: self.limit });
        }
        Ok(())
    }
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    beta: Vec<S>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    upper: Vec<Option<S>>,
    at_upper: Vec<bool>,
    blocked: Vec<bool>,
    reduced: Vec<S>,
    cost: Vec<S>,
}

fn positive<S: Scalar>(x: &S) -> bool {
    if S::is_exact() {
        x.is_positive()
    } else {
        *x > S::tolerance()
    }
}

fn negative<S: Scalar>(x: &S) -> bool {
    if S::is_exact() {
        x.is_negative()
    } else {
        *x < -S::tolerance()
    }
}

fn nonzero<S: Scalar>(x: &S) -> bool {
    positive(x) || negative(x)
}

impl<S: Scalar> Tableau<S> {
    fn ncols(&self) -> usize {
        self.upper.len()
    }

    fn set_cost(&mut self, cost: Vec<S>) {
        let mut reduced = cost.clone();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (k, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    reduced[k].sub_mul(cb, a);
                }
            }
        }
        self.reduced = reduced;
        self.cost = cost;
    }

    fn nonbasic_value(&self, j: usize) -> S {
        if self.at_upper[j] {
            self.upper[j].clone().expect("at upper implies a finite bound")
        } else {
            S::zero()
        }
    }

    fn value(&self, j: usize) -> S {
        match self.row_of[j] {
            Some(i) => self.beta[i].clone(),
            None => self.nonbasic_value(j),
        }
    }

    fn objective(&self) -> S {
        (0..self.ncols()).fold(S::zero(), |acc, j| {
            if self.cost[j].is_zero() {
                acc
            } else {
                acc + self.cost[j].clone() * self.value(j)
            }
        })
    }

    fn eligible(&self, j: usize) -> Option<bool> {
        if self.row_of[j].is_some() || self.blocked[j] {
            return None;
        }
        let d = &self.reduced[j];
        let fixed = self.upper[j].as_ref().is_some_and(|u| u.is_zero());
        if positive(d) && !self.at_upper[j] && !fixed {
            Some(true)
        } else if negative(d) && self.at_upper[j] {
            Some(false)
        } else {
            None
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool)> = None;
        for j in 0..self.ncols() {
            let Some(up) = self.eligible(j) else { continue };
            if bland {
                return Some((j, up));
            }
            match best {
                Some((b, _)) if self.reduced[j].abs() <= self.reduced[b].abs() => {}
                _ => best = Some((j, up)),
            }
        }
        best
    }

    /// Runs simplex iterations to optimality for the current costs.
    fn optimize(&mut self, budget: &mut PivotBudget) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some((j, increasing)) = self.choose_entering(bland) else {
                return Ok(());
            };
            let sigma = if increasing { S::one() } else { -S::one() };
            // Largest step, and the row that blocks it (None: bound flip).
            let mut step: Option<S> = self.upper[j].clone();
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !nonzero(a) {
                    continue;
                }
                let rate = sigma.clone() * a.clone();
                let (limit, to_upper) = if positive(&rate) {
                    (self.beta[i].clone() / rate, false)
                } else {
                    match &self.upper[self.basis[i]] {
                        Some(u) => ((u.clone() - self.beta[i].clone()) / -rate, true),
                        None => continue,
                    }
                };
                let limit = if limit.is_negative() { S::zero() } else { limit };
                let better = match (&step, leave) {
                    (None, _) => true,
                    (Some(s), _) if limit < *s => true,
                    (Some(s), Some((r, _))) if limit == *s => self.basis[i] < self.basis[r],
                    _ => false,
                };
                if better {
                    step = Some(limit);
                    leave = Some((i, to_upper));
                }
            }
            let step = step.expect("bounded program");
            budget.spend()?;
            if positive(&step) {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            let delta = sigma * step;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    self.beta[i].sub_mul(a, &delta);
                }
            }
            let entering_value = self.nonbasic_value(j) + delta;
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.row_of[out] = None;
                    self.at_upper[out] = to_upper;
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.basis[r] = j;
                    self.row_of[j] = Some(r);
                    self.at_upper[j] = false;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = S::one() / self.rows[r][j].clone();
        let mut support = Vec::new();
        for (k, a) in self.rows[r].iter_mut().enumerate() {
            if !a.is_zero() {
                *a = a.clone() * inv.clone();
                support.push(k);
            }
        }
        self.rows[r][j] = S::one();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |target: &mut Vec<S>, factor: S| {
            for &k in &support {
                target[k].sub_mul(&factor, &pivot_row[k]);
                if !S::is_exact() && !nonzero(&target[k]) {
                    target[k] = S::zero();
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let factor = row[j].clone();
            eliminate(row, factor);
            row[j] = S::zero();
        }
        if !self.reduced[j].is_zero() {
            let factor = self.reduced[j].clone();
            eliminate(&mut self.reduced, factor);
            self.reduced[j] = S::zero();
        }
        self.rows[r] = pivot_row;
    }
}

/// Solves `p` exactly (for exact scalars) with the two-phase method.
pub fn solve_lp<S: Scalar>(p: &LpProblem<S>, budget: &mut PivotBudget) -> Result<LpOutcome<S>> {
    let n = p.lower.len();
    let mut rows_in: Vec<(Vec<(usize, S)>, Relation, S)> = Vec::with_capacity(p.rows.len());
    for row in &p.rows {
        let shift = row.terms.iter().fold(S::zero(), |acc, (j, a)| acc + a.clone() * p.lower[*j].clone());
        let mut rhs = row.rhs.clone() - shift;
        let mut terms = row.terms.clone();
        let mut relation = row.relation;
        if terms.is_empty() {
            let ok = match relation {
                Relation::Le => !negative(&rhs),
                Relation::Ge => !positive(&rhs),
                Relation::Eq => !nonzero(&rhs),
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        if rhs.is_negative() {
            rhs = -rhs;
            for (_, a) in terms.iter_mut() {
                *a = -a.clone();
            }
            relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows_in.push((terms, relation, rhs));
    }

    let m = rows_in.len();
    let slack_cols = rows_in.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_cols = rows_in.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = n + slack_cols + art_cols;
    let mut upper: Vec<Option<S>> = (0..n).map(|j| Some(p.upper[j].clone() - p.lower[j].clone())).collect();
    upper.resize(ncols, None);
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        beta: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        row_of: vec![None; ncols],
        upper,
        at_upper: vec![false; ncols],
        blocked: vec![false; ncols],
        reduced: Vec::new(),
        cost: Vec::new(),
    };
    let mut next_slack = n;
    let mut next_art = n + slack_cols;
    let mut artificials = Vec::new();
    for (i, (terms, relation, rhs)) in rows_in.into_iter().enumerate() {
        let mut row = vec![S::zero(); ncols];
        for (j, a) in terms {
            row[j] = row[j].clone() + a;
        }
        let basic = match relation {
            Relation::Le => {
                row[next_slack] = S::one();
                next_slack += 1;
                next_slack - 1
            }
            Relation::Ge => {
                row[next_slack] = -S::one();
                next_slack += 1;
                row[next_art] = S::one();
                next_art += 1;
                next_art - 1
            }
            Relation::Eq => {
                row[next_art] = S::one();
                next_art += 1;
                next_art - 1
            }
        };
        if basic >= n + slack_cols {
            artificials.push(basic);
        }
        t.rows.push(row);
        t.beta.push(rhs);
        t.basis.push(basic);
        t.row_of[basic] = Some(i);
    }

    if !artificials.is_empty() {
        let mut cost = vec![S::zero(); ncols];
        for &a in &artificials {
            cost[a] = -S::one();
        }
        t.set_cost(cost);
        t.optimize(budget)?;
        if negative(&t.objective()) {
            return Ok(LpOutcome::Infeasible);
        }
        for &a in &artificials {
            t.upper[a] = Some(S::zero());
            t.blocked[a] = true;
        }
    }

    let mut cost = vec![S::zero(); ncols];
    cost[..n].clone_from_slice(&p.objective);
    t.set_cost(cost);
    t.optimize(budget)?;

    let values: Vec<S> = (0..n).map(|j| p.lower[j].clone() + t.value(j)).collect();
    let objective = values.iter().zip(&p.objective).fold(S::zero(), |acc, (x, c)| acc + c.clone() * x.clone());
    Ok(LpOutcome::Optimal { values, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(num: i64, den: i64) -> Rational {
        Rational::from_ratio(num, den)
    }

    fn row(terms: &[(usize, i64)], relation: Relation, rhs: i64) -> LpRow<Rational> {
        LpRow { terms: terms.iter().map(|&(j, a)| (j, q(a, 1))).collect(), relation, rhs: q(rhs, 1) }
    }

    fn solve(p: &LpProblem<Rational>) -> LpOutcome<Rational> {
        solve_lp(p, &mut PivotBudget::new(10_000)).unwrap()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, 0 <= x <= 3, 0 <= y <= 10
        let p = LpProblem {
            lower: vec![q(0, 1), q(0, 1)],
            upper: vec![q(3, 1), q(10, 1)],
            rows: vec![row(&[(0, 1), (1, 1)], Relation::Le, 4), row(&[(0, 1), (1, 3)], Relation::Le, 6)],
            objective: vec![q(3, 1), q(2, 1)],
        };
        let LpOutcome::Optimal { values, objective } = solve(&p) else { panic!("infeasible") };
        assert_eq!(objective, q(11, 1));
        assert_eq!(values, vec![q(3, 1), q(1, 1)]);
    }

    #[test]
    fn equality_and_negative_bounds() {
        // min x + y (as max of the negation), x - y = 1, x + y >= -3, -5 <= x, y <= 5
        let p = LpProblem {
            lower: vec![q(-5, 1), q(-5, 1)],
            upper: vec![q(5, 1), q(5, 1)],
            rows: vec![row(&[(0, 1), (1, -1)], Relation::Eq, 1), row(&[(0, 1), (1, 1)], Relation::Ge, -3)],
            objective: vec![q(-1, 1), q(-1, 1)],
        };
        let LpOutcome::Optimal { values, objective } = solve(&p) else { panic!("infeasible") };
        assert_eq!(objective, q(3, 1));
        assert_eq!(values, vec![q(-1, 1), q(-2, 1)]);
    }

    #[test]
    fn detects_infeasibility() {
        let p = LpProblem {
            lower: vec![q(0, 1)],
            upper: vec![q(1, 1)],
            rows: vec![row(&[(0, 1)], Relation::Ge, 2)],
            objective: vec![q(1, 1)],
        };
        assert_eq!(solve(&p), LpOutcome::Infeasible);
        let empty_row = LpProblem {
            lower: vec![q(0, 1)],
            upper: vec![q(1, 1)],
            rows: vec![row(&[], Relation::Ge, 1)],
            objective: vec![q(1, 1)],
        };
        assert_eq!(solve(&empty_row), LpOutcome::Infeasible);
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max x + y, 2x + y <= 1, x + 3y <= 1  ->  (2/5, 1/5)
        let p = LpProblem {
            lower: vec![q(0, 1), q(0, 1)],
            upper: vec![q(1, 1), q(1, 1)],
            rows: vec![row(&[(0, 2), (1, 1)], Relation::Le, 1), row(&[(0, 1), (1, 3)], Relation::Le, 1)],
            objective: vec![q(1, 1), q(1, 1)],
        };
        let LpOutcome::Optimal { values, objective } = solve(&p) else { panic!("infeasible") };
        assert_eq!(values, vec![q(2, 5), q(1, 5)]);
        assert_eq!(objective, q(3, 5));
    }

    #[test]
    fn budget_is_enforced() {
        let p = LpProblem {
            lower: vec![q(0, 1), q(0, 1)],
            upper: vec![q(3, 1), q(10, 1)],
            rows: vec![row(&[(0, 1), (1, 1)], Relation::Le, 4)],
            objective: vec![q(3, 1), q(2, 1)],
        };
        let err = solve_lp(&p, &mut PivotBudget::new(0)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { what: "simplex pivot", .. }));
    }
}

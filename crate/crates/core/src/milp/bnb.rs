//! Branch and bound over LP relaxations.

use crate::error::{Error, Result};
use crate::milp::model::{MilpModel, MilpSolution, Relation, Sense, Status, VarId, VarKind};
use crate::milp::simplex::{solve_lp, LpOutcome, LpProblem, LpRow, PivotBudget};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrder {
    /// Expand the open node with the best LP bound first.
    BestBound,
    /// Expand the most recently created node first, the `1` branch before the `0` branch.
    DepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub max_nodes: usize,
    pub max_pivots: usize,
    pub order: NodeOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_nodes: 100_000, max_pivots: 20_000_000, order: NodeOrder::BestBound }
    }
}

struct Node<S> {
    fixings: Vec<(VarId, bool)>,
    bound: S,
}

/// Solves `model` to proven optimality or infeasibility.
pub fn solve<S: Scalar>(model: &MilpModel<S>, config: &SolverConfig) -> Result<MilpSolution<S>> {
    model.validate()?;
    let sign = match model.sense {
        Sense::Maximize => S::one(),
        Sense::Minimize => -S::one(),
    };
    let mut objective = vec![S::zero(); model.variables.len()];
    for (v, c) in &model.objective {
        objective[v.0] = objective[v.0].clone() + sign.clone() * c.clone();
    }
    let base = LpProblem {
        lower: model.variables.iter().map(|v| v.lower.clone()).collect(),
        upper: model.variables.iter().map(|v| v.upper.clone()).collect(),
        rows: model
            .constraints
            .iter()
            .map(|c| LpRow {
                terms: c.terms.iter().map(|(v, a)| (v.0, a.clone())).collect(),
                relation: c.relation,
                rhs: c.rhs.clone(),
            })
            .collect(),
        objective,
    };
    let binaries: Vec<VarId> = model.binaries().collect();
    let prober = Prober::new(model, &base);
    let mut pivots = PivotBudget::new(config.max_pivots);
    let mut incumbent: Option<(S, Vec<S>)> = None;
    let mut open = vec![Node { fixings: Vec::new(), bound: S::zero() }];
    let mut root = true;
    let mut nodes = 0usize;

    while let Some(node) = pop(&mut open, config.order) {
        if let Some((best, _)) = &incumbent {
            if !root && node.bound <= *best {
                continue;
            }
        }
        root = false;
        nodes += 1;
        if nodes > config.max_nodes {
            return Err(Error::BudgetExceeded { what: "branch-and-bound node", limit: config.max_nodes });
        }
        let mut lp = base.clone();
        for &(v, one) in &node.fixings {
            let value = if one { S::one() } else { S::zero() };
            lp.lower[v.0] = value.clone();
            lp.upper[v.0] = value;
        }
        if !prober.propagate_all(&mut lp.lower, &mut lp.upper) {
            continue;
        }
        let LpOutcome::Optimal { values, objective } = solve_lp(&lp, &mut pivots)? else {
            continue;
        };
        if let Some((best, _)) = &incumbent {
            if objective <= *best {
                continue;
            }
        }
        match most_fractional(&prober, &binaries, &values, &lp, &objective) {
            None => incumbent = Some((objective, values)),
            Some(v) => {
                for one in [false, true] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((v, one));
                    open.push(Node { fixings, bound: objective.clone() });
                }
            }
        }
    }

    Ok(match incumbent {
        None => MilpSolution { status: Status::Infeasible, objective: None, values: Vec::new(), nodes, pivots: pivots.used },
        Some((value, mut values)) => {
            // Snap binaries to exact 0/1 (a no-op for exact scalars).
            for v in &binaries {
                let x = &values[v.0];
                values[v.0] = if *x > S::from_ratio(1, 2) { S::one() } else { S::zero() };
            }
            MilpSolution { status: Status::Optimal, objective: Some(sign * value), values, nodes, pivots: pivots.used }
        }
    })
}

fn pop<S: Scalar>(open: &mut Vec<Node<S>>, order: NodeOrder) -> Option<Node<S>> {
    match order {
        NodeOrder::DepthFirst => open.pop(),
        NodeOrder::BestBound => {
            let mut best = 0;
            for i in 1..open.len() {
                // Later nodes win ties so the search dives when bounds are flat.
                if open[i].bound >= open[best].bound {
                    best = i;
                }
            }
            (!open.is_empty()).then(|| open.swap_remove(best))
        }
    }
}

/// Binary whose LP value is farthest from integral. Exact ties, common in
/// the symmetric STL encodings, go to the candidate whose fixing moves the
/// objective bound most under bound propagation, then to the smallest index.
fn most_fractional<S: Scalar>(
    prober: &Prober<'_, S>,
    binaries: &[VarId],
    values: &[S],
    lp: &LpProblem<S>,
    bound: &S,
) -> Option<VarId> {
    let half = S::from_ratio(1, 2);
    let mut tied: Vec<VarId> = Vec::new();
    let mut best: Option<S> = None;
    for &v in binaries {
        let x = values[v.0].clone();
        let frac = crate::scalar::smin(x.clone(), S::one() - x);
        if frac <= S::tolerance() {
            continue;
        }
        let distance = (frac - half.clone()).abs();
        match &best {
            Some(d) if distance > *d => {}
            Some(d) if distance == *d => tied.push(v),
            _ => {
                best = Some(distance);
                tied = vec![v];
            }
        }
    }
    if tied.len() <= 1 {
        return tied.first().copied();
    }
    let mut choice: Option<(VarId, Score<S>)> = None;
    for v in tied {
        let score = prober.score(lp, v, bound);
        if choice.as_ref().map_or(true, |(_, s)| score > *s) {
            choice = Some((v, score));
        }
    }
    choice.map(|(v, _)| v)
}

/// `(smaller drop, larger drop)`; a drop is `(infeasible, amount)` so a
/// refuted fixing outranks any finite drop.
type Score<S> = ((bool, S), (bool, S));

/// Bound propagation over the rows of one model.
struct Prober<'a, S> {
    rows: &'a [LpRow<S>],
    binary: Vec<bool>,
    /// Rows in which each column appears.
    columns: Vec<Vec<usize>>,
}

impl<'a, S: Scalar> Prober<'a, S> {
    fn new(model: &MilpModel<S>, lp: &'a LpProblem<S>) -> Self {
        let mut columns = vec![Vec::new(); lp.lower.len()];
        for (i, row) in lp.rows.iter().enumerate() {
            for (j, _) in &row.terms {
                columns[*j].push(i);
            }
        }
        let binary = model.variables.iter().map(|v| v.kind == VarKind::Binary).collect();
        Prober { rows: &lp.rows, binary, columns }
    }

    /// How far the objective bound falls when `v` is fixed to 0 and to 1.
    fn score(&self, lp: &LpProblem<S>, v: VarId, bound: &S) -> Score<S> {
        let drop = |value: S| {
            let mut lower = lp.lower.clone();
            let mut upper = lp.upper.clone();
            lower[v.0] = value.clone();
            upper[v.0] = value;
            if !self.propagate(&self.columns[v.0], &mut lower, &mut upper) {
                return (true, S::zero());
            }
            let ceiling = objective_ceiling(lp, &lower, &upper);
            (false, if ceiling < *bound { bound.clone() - ceiling } else { S::zero() })
        };
        let (a, b) = (drop(S::zero()), drop(S::one()));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Tightens `lower`/`upper` from every row.
    fn propagate_all(&self, lower: &mut [S], upper: &mut [S]) -> bool {
        let all: Vec<usize> = (0..self.rows.len()).collect();
        self.propagate(&all, lower, upper)
    }

    /// Activity-based bound tightening starting from `rows`. Binary bounds
    /// are rounded inward. Returns false on a proven conflict.
    fn propagate(&self, rows: &[usize], lower: &mut [S], upper: &mut [S]) -> bool {
        let mut queued = vec![false; self.rows.len()];
        let mut queue: std::collections::VecDeque<usize> = rows.iter().copied().collect();
        for &i in &queue {
            queued[i] = true;
        }
        let mut visits = 0;
        while let Some(i) = queue.pop_front() {
            queued[i] = false;
            visits += 1;
            if visits > 8 * self.rows.len() {
                break;
            }
            let row = &self.rows[i];
            let signs: &[i64] = match row.relation {
                Relation::Le => &[1],
                Relation::Ge => &[-1],
                Relation::Eq => &[1, -1],
            };
            for &sign in signs {
                // Written as `sum c_j x_j <= r` with c = sign * a.
                let sign = S::from_ratio(sign, 1);
                let r = sign.clone() * row.rhs.clone();
                let coef: Vec<(usize, S)> = row.terms.iter().map(|(j, a)| (*j, sign.clone() * a.clone())).collect();
                let low = |j: usize, c: &S, lower: &[S], upper: &[S]| {
                    if c.is_positive() {
                        c.clone() * lower[j].clone()
                    } else {
                        c.clone() * upper[j].clone()
                    }
                };
                let min_activity = coef.iter().fold(S::zero(), |acc, (j, c)| acc + low(*j, c, lower, upper));
                if min_activity > r.clone() + S::tolerance() {
                    return false;
                }
                let slack = r - min_activity;
                for (j, c) in &coef {
                    let is_upper = c.is_positive();
                    let mut limit = (slack.clone() + low(*j, c, lower, upper)) / c.clone();
                    if self.binary[*j] {
                        let one = S::one() - S::tolerance();
                        limit = match is_upper {
                            true if limit < one => S::zero(),
                            true => S::one(),
                            false if limit > S::tolerance() => S::one(),
                            false => S::zero(),
                        };
                    }
                    let changed = if is_upper && limit < upper[*j].clone() - S::tolerance() {
                        upper[*j] = limit;
                        true
                    } else if !is_upper && limit > lower[*j].clone() + S::tolerance() {
                        lower[*j] = limit;
                        true
                    } else {
                        false
                    };
                    if lower[*j] > upper[*j].clone() + S::tolerance() {
                        return false;
                    }
                    if changed {
                        for &k in &self.columns[*j] {
                            if k != i && !queued[k] {
                                queued[k] = true;
                                queue.push_back(k);
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// Upper bound of the (maximized) objective over the box.
fn objective_ceiling<S: Scalar>(lp: &LpProblem<S>, lower: &[S], upper: &[S]) -> S {
    lp.objective.iter().enumerate().fold(S::zero(), |acc, (j, c)| {
        if c.is_positive() {
            acc + c.clone() * upper[j].clone()
        } else if c.is_negative() {
            acc + c.clone() * lower[j].clone()
        } else {
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(num: i64, den: i64) -> Rational {
        Rational::from_ratio(num, den)
    }

    #[test]
    fn pure_lp() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", q(0, 1), q(10, 1));
        m.add_constraint("c", vec![(x, q(1, 1))], Relation::Le, q(3, 1));
        m.set_objective(Sense::Maximize, vec![(x, q(1, 1))]);
        let sol = solve(&m, &SolverConfig::default()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.objective, Some(q(3, 1)));
    }

    #[test]
    fn knapsack_needs_branching() {
        // max 5a + 4b + 3c, 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut m = MilpModel::new();
        let vars: Vec<_> = ["a", "b", "c"].iter().map(|n| m.add_binary(*n)).collect();
        let row = |coefs: [i64; 3]| vars.iter().zip(coefs).map(|(v, c)| (*v, q(c, 1))).collect::<Vec<_>>();
        m.add_constraint("r1", row([2, 3, 1]), Relation::Le, q(5, 1));
        m.add_constraint("r2", row([4, 1, 2]), Relation::Le, q(11, 1));
        m.add_constraint("r3", row([3, 4, 2]), Relation::Le, q(8, 1));
        m.add_constraint("r4", row([1, 1, 1]), Relation::Le, q(5, 2));
        m.set_objective(Sense::Maximize, row([5, 4, 3]));
        for order in [NodeOrder::BestBound, NodeOrder::DepthFirst] {
            let sol = solve(&m, &SolverConfig { order, ..SolverConfig::default() }).unwrap();
            assert_eq!(sol.objective, Some(q(9, 1)), "{order:?}");
            assert!(m.is_feasible(&sol.values));
        }
    }

    #[test]
    fn minimization_and_infeasibility() {
        let mut m = MilpModel::new();
        let z = m.add_binary("z");
        let x = m.add_continuous("x", q(0, 1), q(1, 1));
        m.add_constraint("link", vec![(x, q(1, 1)), (z, q(-1, 2))], Relation::Ge, q(1, 4));
        m.set_objective(Sense::Minimize, vec![(x, q(1, 1)), (z, q(1, 1))]);
        let sol = solve(&m, &SolverConfig::default()).unwrap();
        assert_eq!(sol.objective, Some(q(1, 4)));
        m.add_constraint("force", vec![(z, q(1, 1))], Relation::Eq, q(1, 2));
        let sol = solve(&m, &SolverConfig::default()).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn node_budget_is_distinct_from_infeasibility() {
        let mut m = MilpModel::new();
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        let c = m.add_binary("c");
        m.add_constraint("half", vec![(a, q(1, 1)), (b, q(1, 1)), (c, q(1, 1))], Relation::Eq, q(3, 2));
        m.set_objective(Sense::Maximize, vec![(a, q(1, 1))]);
        let err = solve(&m, &SolverConfig { max_nodes: 1, ..SolverConfig::default() }).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { what: "branch-and-bound node", limit: 1 }));
        assert_eq!(solve(&m, &SolverConfig::default()).unwrap().status, Status::Infeasible);
    }
}

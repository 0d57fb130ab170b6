use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<S> {
    pub name: String,
    pub kind: VarKind,
    pub lower: S,
    pub upper: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// `sum(coef * var) relation rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub name: String,
    pub terms: Vec<(VarId, S)>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> Constraint<S> {
    pub fn lhs_at(&self, values: &[S]) -> S {
        self.terms.iter().fold(S::zero(), |acc, (v, c)| acc + c.clone() * values[v.0].clone())
    }

    /// Whether `values` satisfy the constraint within the scalar tolerance.
    pub fn holds_at(&self, values: &[S]) -> bool {
        let lhs = self.lhs_at(values);
        let tol = S::tolerance();
        match self.relation {
            Relation::Le => lhs <= self.rhs.clone() + tol,
            Relation::Ge => lhs >= self.rhs.clone() - tol,
            Relation::Eq => (lhs - self.rhs.clone()).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Mixed-integer linear program with finite bounds on every variable.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel<S> {
    pub variables: Vec<Variable<S>>,
    pub constraints: Vec<Constraint<S>>,
    pub sense: Sense,
    pub objective: Vec<(VarId, S)>,
}

impl<S: Scalar> Default for MilpModel<S> {
    fn default() -> Self {
        MilpModel { variables: Vec::new(), constraints: Vec::new(), sense: Sense::Maximize, objective: Vec::new() }
    }
}

impl<S: Scalar> MilpModel<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: S, upper: S) -> VarId {
        self.variables.push(Variable { name: name.into(), kind: VarKind::Continuous, lower, upper });
        VarId(self.variables.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.variables.push(Variable { name: name.into(), kind: VarKind::Binary, lower: S::zero(), upper: S::one() });
        VarId(self.variables.len() - 1)
    }

    /// Adds a constraint; terms on the same variable are merged and zero
    /// coefficients dropped.
    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(VarId, S)>, relation: Relation, rhs: S) {
        let mut merged: Vec<(VarId, S)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some((_, acc)) => *acc = acc.clone() + c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint { name: name.into(), terms: merged, relation, rhs });
    }

    pub fn set_objective(&mut self, sense: Sense, terms: Vec<(VarId, S)>) {
        self.sense = sense;
        self.objective = terms;
    }

    pub fn var(&self, id: VarId) -> &Variable<S> {
        &self.variables[id.0]
    }

    pub fn find(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| VarId(i))
    }

    pub fn num_binaries(&self) -> usize {
        self.binaries().count()
    }

    pub fn objective_at(&self, values: &[S]) -> S {
        self.objective.iter().fold(S::zero(), |acc, (v, c)| acc + c.clone() * values[v.0].clone())
    }

    /// Checks that every referenced variable exists, bounds are ordered and
    /// names are unique.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        let mut names = std::collections::HashSet::new();
        for v in &self.variables {
            if v.lower > v.upper {
                return Err(Error::InvalidConfig(format!("variable {} has lower > upper", v.name)));
            }
            if !names.insert(v.name.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate variable name {}", v.name)));
            }
        }
        let referenced = self.constraints.iter().flat_map(|c| &c.terms).chain(&self.objective);
        for (v, _) in referenced {
            if v.0 >= n {
                return Err(Error::InvalidConfig(format!("undeclared variable index {}", v.0)));
            }
        }
        Ok(())
    }

    /// Whether `values` is a feasible point: bounds, constraints and
    /// integrality of binaries.
    pub fn is_feasible(&self, values: &[S]) -> bool {
        let tol = S::tolerance();
        values.len() == self.variables.len()
            && self.variables.iter().zip(values).all(|(v, x)| {
                let in_bounds = v.lower.clone() - tol.clone() <= *x && *x <= v.upper.clone() + tol.clone();
                let integral = v.kind == VarKind::Continuous
                    || x.abs() <= tol
                    || (x.clone() - S::one()).abs() <= tol;
                in_bounds && integral
            })
            && self.constraints.iter().all(|c| c.holds_at(values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution<S> {
    pub status: Status,
    pub objective: Option<S>,
    /// Indexed by [`VarId`]; empty when infeasible.
    pub values: Vec<S>,
    pub nodes: usize,
    pub pivots: usize,
}

impl<S: Scalar> MilpSolution<S> {
    pub fn value(&self, var: VarId) -> Option<&S> {
        self.values.get(var.0)
    }
}

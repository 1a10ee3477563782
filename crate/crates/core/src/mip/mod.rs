//! MILP model container and a deterministic branch-and-bound solver.

mod bnb;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
pub use crate::lp::{Relation, Row, Sense};

pub use bnb::{solve_mip, solve_mip_traced, NodeRecord};

/// Values within this distance of an integer count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Members with magnitude above this count as nonzero for SOS checks.
pub const SOS_NONZERO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
    Integer,
}

impl VarKind {
    pub fn is_discrete(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SosKind {
    Sos1,
    Sos2,
}

/// An ordered set of variables with reference weights used for branching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosSet {
    pub kind: SosKind,
    /// `(variable, reference weight)`, weights strictly increasing.
    pub members: Vec<(usize, f64)>,
}

impl SosSet {
    /// Whether `values` satisfy the set's nonzero pattern.
    pub fn is_satisfied(&self, values: &[f64]) -> bool {
        let nonzero: Vec<usize> = self
            .members
            .iter()
            .enumerate()
            .filter(|(_, &(v, _))| values[v].abs() > SOS_NONZERO_TOL)
            .map(|(k, _)| k)
            .collect();
        match self.kind {
            SosKind::Sos1 => nonzero.len() <= 1,
            SosKind::Sos2 => match nonzero.as_slice() {
                [] | [_] => true,
                [a, b] => b - a == 1,
                _ => false,
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub sense: Sense,
    pub vars: Vec<Variable>,
    pub constraints: Vec<Row>,
    pub sos_sets: Vec<SosSet>,
    pub objective: Objective,
    names: HashMap<String, usize>,
}

impl Model {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            vars: Vec::new(),
            constraints: Vec::new(),
            sos_sets: Vec::new(),
            objective: Objective::default(),
            names: HashMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> Result<usize> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(invalid(format!("duplicate variable name {name:?}")));
        }
        if lower.is_nan() || upper.is_nan() || lower == f64::INFINITY || upper == f64::NEG_INFINITY
        {
            return Err(invalid(format!("variable {name:?} has unusable bounds")));
        }
        if lower > upper {
            return Err(invalid(format!(
                "variable {name:?} has inverted bounds [{lower}, {upper}]"
            )));
        }
        let (lower, upper) = match kind {
            VarKind::Binary => {
                if lower < 0.0 || upper > 1.0 {
                    return Err(invalid(format!("binary {name:?} must lie within [0, 1]")));
                }
                (lower.ceil(), upper.floor())
            }
            _ => (lower, upper),
        };
        let idx = self.vars.len();
        self.names.insert(name.clone(), idx);
        self.vars.push(Variable {
            name,
            lower,
            upper,
            kind,
        });
        Ok(idx)
    }

    /// Adds a `[0, 1]` binary.
    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<usize> {
        self.add_variable(name, 0.0, 1.0, VarKind::Binary)
    }

    fn check_terms(&self, terms: &[(usize, f64)]) -> Result<()> {
        let mut seen = vec![false; self.vars.len()];
        for &(j, a) in terms {
            if j >= self.vars.len() {
                return Err(invalid(format!(
                    "term references variable {j}, model has {}",
                    self.vars.len()
                )));
            }
            if !a.is_finite() {
                return Err(invalid("term coefficient is not finite"));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(invalid(format!("variable {j} appears twice in one row")));
            }
        }
        Ok(())
    }

    pub fn add_linear_constraint(
        &mut self,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize> {
        self.check_terms(&terms)?;
        if !rhs.is_finite() {
            return Err(invalid("constraint rhs is not finite"));
        }
        self.constraints.push(Row::new(terms, relation, rhs));
        Ok(self.constraints.len() - 1)
    }

    pub fn add_sos(&mut self, kind: SosKind, members: Vec<(usize, f64)>) -> Result<usize> {
        if members.len() < 2 {
            return Err(invalid("an SOS set needs at least two members"));
        }
        self.check_terms(&members)?;
        if members.windows(2).any(|w| w[1].1 <= w[0].1) {
            return Err(invalid("SOS reference weights must be strictly increasing"));
        }
        self.sos_sets.push(SosSet { kind, members });
        Ok(self.sos_sets.len() - 1)
    }

    /// Replaces the objective.
    pub fn set_objective(&mut self, terms: Vec<(usize, f64)>, constant: f64) -> Result<()> {
        self.check_terms(&terms)?;
        if !constant.is_finite() {
            return Err(invalid("objective constant is not finite"));
        }
        self.objective = Objective { terms, constant };
        Ok(())
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.constant
            + self
                .objective
                .terms
                .iter()
                .map(|&(j, c)| c * values[j])
                .sum::<f64>()
    }

    /// Re-checks a point against bounds, rows, integrality and SOS sets.
    /// Returns a description of the first violation.
    pub fn check_point(&self, values: &[f64], tol: f64) -> std::result::Result<(), String> {
        if values.len() != self.vars.len() {
            return Err(format!(
                "{} values for {} variables",
                values.len(),
                self.vars.len()
            ));
        }
        for (v, &x) in self.vars.iter().zip(values) {
            if x < v.lower - tol || x > v.upper + tol {
                return Err(format!("{} = {x} outside [{}, {}]", v.name, v.lower, v.upper));
            }
            if v.kind.is_discrete() && (x - x.round()).abs() > INTEGRALITY_TOL {
                return Err(format!("{} = {x} is not integral", v.name));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            let lhs = row.activity(values);
            if !row.relation.holds(lhs, row.rhs, tol) {
                return Err(format!(
                    "constraint {i}: {lhs} {:?} {} violated",
                    row.relation, row.rhs
                ));
            }
        }
        for (k, set) in self.sos_sets.iter().enumerate() {
            if !set.is_satisfied(values) {
                return Err(format!("SOS set {k} violated"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub node_limit: Option<usize>,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            time_limit: None,
            abs_gap: 1e-6,
            rel_gap: 1e-9,
            node_limit: None,
        }
    }
}

impl SolveParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return Err(invalid("time limit must be positive"));
            }
        }
        if self.node_limit == Some(0) {
            return Err(invalid("node limit must be positive"));
        }
        if !(self.abs_gap >= 0.0) || !(self.rel_gap >= 0.0) {
            return Err(invalid("gaps must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    /// A limit stopped the search after an incumbent was found.
    Feasible,
    Infeasible,
    Unbounded,
    /// A limit stopped the search before any incumbent was found.
    NoSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Vec<f64>,
    /// Best proven dual bound, in the model's sense.
    pub bound: Option<f64>,
    pub nodes: usize,
    pub lp_iterations: usize,
}

impl Solution {
    pub fn has_incumbent(&self) -> bool {
        self.objective.is_some()
    }

    /// `|objective − bound| / max(1, |objective|)`.
    pub fn gap(&self) -> Option<f64> {
        match (self.objective, self.bound) {
            (Some(o), Some(b)) => Some((o - b).abs() / o.abs().max(1.0)),
            _ => None,
        }
    }
}

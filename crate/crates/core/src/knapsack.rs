//! Selecting products to fill free machine time for maximum profit.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mip::{solve_mip, Model, Relation, Sense, SolveParams, SolveStatus, Solution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub profits: Vec<f64>,
    /// Process duration per item.
    pub weights: Vec<f64>,
    /// Available machine time.
    pub capacity: f64,
}

impl KnapsackInstance {
    pub fn validate(&self) -> Result<()> {
        if self.profits.is_empty() {
            return Err(invalid("knapsack needs at least one item"));
        }
        if self.profits.len() != self.weights.len() {
            return Err(invalid(format!(
                "{} profits but {} weights",
                self.profits.len(),
                self.weights.len()
            )));
        }
        if self.profits.iter().chain(&self.weights).any(|v| !v.is_finite()) {
            return Err(invalid("profits and weights must be finite"));
        }
        if self.weights.iter().any(|&w| w < 0.0) {
            return Err(invalid("weights must be nonnegative"));
        }
        if !(self.capacity >= 0.0) || !self.capacity.is_finite() {
            return Err(invalid("capacity must be a finite nonnegative number"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn len(&self) -> usize {
        self.profits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profits.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackPlan {
    /// 0-based item indices, ascending.
    pub chosen: Vec<usize>,
    pub profit: f64,
    pub load: f64,
}

impl KnapsackPlan {
    /// 1-based item labels for display.
    pub fn labels(&self) -> Vec<usize> {
        self.chosen.iter().map(|i| i + 1).collect()
    }

    pub fn verify(&self, inst: &KnapsackInstance) -> Result<()> {
        if self.chosen.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Verify("chosen items must be ascending and distinct".into()));
        }
        if let Some(&i) = self.chosen.iter().find(|&&i| i >= inst.len()) {
            return Err(Error::Verify(format!("item {i} does not exist")));
        }
        let load: f64 = self.chosen.iter().map(|&i| inst.weights[i]).sum();
        let profit: f64 = self.chosen.iter().map(|&i| inst.profits[i]).sum();
        if (load - self.load).abs() > 1e-6 || (profit - self.profit).abs() > 1e-6 {
            return Err(Error::Verify("reported load or profit does not match the items".into()));
        }
        if load > inst.capacity + 1e-6 {
            return Err(Error::Verify(format!("load {load} exceeds capacity {}", inst.capacity)));
        }
        Ok(())
    }
}

/// One binary per item, a single capacity row, profit maximized.
pub fn build_knapsack(inst: &KnapsackInstance) -> Result<(Model, Vec<usize>)> {
    inst.validate()?;
    let mut model = Model::new(Sense::Maximize);
    let vars = (0..inst.len())
        .map(|i| model.add_binary(format!("x_{i}")))
        .collect::<Result<Vec<_>>>()?;
    let weight_terms = vars.iter().zip(&inst.weights).map(|(&j, &w)| (j, w)).collect();
    model.add_linear_constraint(weight_terms, Relation::Le, inst.capacity)?;
    let profit_terms = vars.iter().zip(&inst.profits).map(|(&j, &p)| (j, p)).collect();
    model.set_objective(profit_terms, 0.0)?;
    Ok((model, vars))
}

pub fn decode_knapsack(
    solution: &Solution,
    vars: &[usize],
    inst: &KnapsackInstance,
) -> Result<KnapsackPlan> {
    if !solution.has_incumbent() {
        return Err(Error::NoIncumbent);
    }
    let chosen: Vec<usize> = vars
        .iter()
        .enumerate()
        .filter(|(_, &j)| solution.values[j] > 0.5)
        .map(|(i, _)| i)
        .collect();
    let plan = KnapsackPlan {
        profit: chosen.iter().map(|&i| inst.profits[i]).sum(),
        load: chosen.iter().map(|&i| inst.weights[i]).sum(),
        chosen,
    };
    plan.verify(inst).map_err(|e| Error::Decode(e.to_string()))?;
    Ok(plan)
}

/// Solves for maximum profit, then picks the optimal selection with the
/// fewest items (fewer product changeovers on the machine).
///
/// The returned [`Solution`] carries the first-stage status, objective and
/// bound; its values are the second-stage selection, and node and iteration
/// counts cover both stages.
pub fn solve_knapsack(inst: &KnapsackInstance, params: &SolveParams) -> Result<(Solution, Option<KnapsackPlan>)> {
    let (model, vars) = build_knapsack(inst)?;
    let mut solution = solve_mip(&model, params)?;
    if solution.status == SolveStatus::Optimal {
        let best = solution.objective.expect("optimal solution has an objective");
        let mut tie_break = model.clone();
        tie_break.add_linear_constraint(model.objective.terms.clone(), Relation::Ge, best - 1e-6)?;
        tie_break.set_objective(vars.iter().map(|&j| (j, -1.0)).collect(), 0.0)?;
        let refined = solve_mip(&tie_break, params)?;
        solution.nodes += refined.nodes;
        solution.lp_iterations += refined.lp_iterations;
        if refined.status == SolveStatus::Optimal {
            solution.objective = Some(model.objective_value(&refined.values));
            solution.values = refined.values;
        }
    }
    let plan = if solution.has_incumbent() {
        Some(decode_knapsack(&solution, &vars, inst)?)
    } else {
        None
    };
    Ok((solution, plan))
}

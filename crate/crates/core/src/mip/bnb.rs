use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Model, Sense, SolveParams, SolveStatus, Solution, SosKind, SosSet, INTEGRALITY_TOL, SOS_NONZERO_TOL};
use crate::error::Result;
use crate::lp::{solve_lp, LpProblem, LpStatus};

/// What happened at one branch-and-bound node, for search-tree inspection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeFate {
    Infeasible,
    Pruned,
    Integral,
    BranchedOnSos,
    BranchedOnVariable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    /// LP objective at this node in the model's sense, constant included.
    pub lp_bound: Option<f64>,
    pub fate: NodeFate,
    /// Rounded point offered as an incumbent at an `Integral` node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
}

/// A pending subproblem. `key` is the parent's LP value mapped to
/// minimization, so smaller is better regardless of the model sense.
#[derive(Debug, Clone)]
struct Node {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    key: f64,
    /// Bound tightenings relative to the model, applied in order.
    changes: Vec<(usize, f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap: best (smallest) key first, then most recently created.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| self.id.cmp(&other.id))
    }
}

pub fn solve_mip(model: &Model, params: &SolveParams) -> Result<Solution> {
    Search::new(model, params, false).run().map(|(s, _)| s)
}

/// Like [`solve_mip`], also returning one record per processed node.
pub fn solve_mip_traced(model: &Model, params: &SolveParams) -> Result<(Solution, Vec<NodeRecord>)> {
    Search::new(model, params, true).run()
}

struct Search<'a> {
    model: &'a Model,
    params: &'a SolveParams,
    lp: LpProblem,
    /// +1 for minimization, −1 for maximization.
    flip: f64,
    trace: Option<Vec<NodeRecord>>,
    incumbent: Option<(f64, Vec<f64>)>,
    nodes: usize,
    lp_iterations: usize,
    next_id: usize,
}

impl<'a> Search<'a> {
    fn new(model: &'a Model, params: &'a SolveParams, traced: bool) -> Self {
        let n = model.num_vars();
        let mut objective = vec![0.0; n];
        for &(j, c) in &model.objective.terms {
            objective[j] += c;
        }
        let lp = LpProblem {
            num_vars: n,
            objective,
            sense: model.sense,
            var_bounds: model.vars.iter().map(|v| (v.lower, v.upper)).collect(),
            rows: model.constraints.clone(),
        };
        let flip = match model.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        Self {
            model,
            params,
            lp,
            flip,
            trace: traced.then(Vec::new),
            incumbent: None,
            nodes: 0,
            lp_iterations: 0,
            next_id: 0,
        }
    }

    fn tolerance(&self) -> f64 {
        match &self.incumbent {
            Some((key, _)) => self.params.abs_gap.max(self.params.rel_gap * self.to_objective(*key).abs()),
            None => 0.0,
        }
    }

    fn to_objective(&self, key: f64) -> f64 {
        self.flip * key + self.model.objective.constant
    }

    fn can_prune(&self, key: f64) -> bool {
        match &self.incumbent {
            Some((best, _)) => key >= best - self.tolerance(),
            None => false,
        }
    }

    fn child(&mut self, parent: &Node, key: f64, extra: Vec<(usize, f64, f64)>) -> Node {
        let mut changes = parent.changes.clone();
        changes.extend(extra);
        let id = self.next_id;
        self.next_id += 1;
        Node {
            id,
            parent: Some(parent.id),
            depth: parent.depth + 1,
            key,
            changes,
        }
    }

    fn record(&mut self, node: &Node, key: Option<f64>, fate: NodeFate) {
        let lp_bound = key.map(|k| self.to_objective(k));
        if let Some(trace) = &mut self.trace {
            trace.push(NodeRecord {
                id: node.id,
                parent: node.parent,
                depth: node.depth,
                lp_bound,
                fate,
                point: None,
            });
        }
    }

    fn run(mut self) -> Result<(Solution, Vec<NodeRecord>)> {
        self.params.validate()?;
        let start = Instant::now();
        let mut open = BinaryHeap::new();
        open.push(Node {
            id: 0,
            parent: None,
            depth: 0,
            key: f64::NEG_INFINITY,
            changes: Vec::new(),
        });
        self.next_id = 1;
        let mut bounds = self.lp.var_bounds.clone();
        let mut limit_hit = false;

        while let Some(node) = open.pop() {
            if self.can_prune(node.key) {
                // Best-first: every remaining node is at least as bad.
                open.push(node);
                break;
            }
            let out_of_nodes = self.params.node_limit.is_some_and(|l| self.nodes >= l);
            let out_of_time = self
                .params
                .time_limit
                .is_some_and(|t| start.elapsed().as_secs_f64() >= t);
            if out_of_nodes || out_of_time {
                open.push(node);
                limit_hit = true;
                break;
            }

            bounds.clone_from(&self.lp.var_bounds);
            let mut empty = false;
            for &(j, lo, hi) in &node.changes {
                let b = &mut bounds[j];
                b.0 = b.0.max(lo);
                b.1 = b.1.min(hi);
                empty |= b.0 > b.1;
            }
            self.nodes += 1;
            if empty {
                self.record(&node, None, NodeFate::Infeasible);
                continue;
            }
            std::mem::swap(&mut self.lp.var_bounds, &mut bounds);
            let outcome = solve_lp(&self.lp);
            std::mem::swap(&mut self.lp.var_bounds, &mut bounds);
            let outcome = outcome?;
            self.lp_iterations += outcome.iterations;

            match outcome.status {
                LpStatus::Infeasible => {
                    self.record(&node, None, NodeFate::Infeasible);
                    continue;
                }
                LpStatus::Unbounded => {
                    // Children only tighten bounds, so this can only happen at
                    // the root.
                    self.record(&node, None, NodeFate::Pruned);
                    let solution = Solution {
                        status: SolveStatus::Unbounded,
                        objective: None,
                        values: Vec::new(),
                        bound: None,
                        nodes: self.nodes,
                        lp_iterations: self.lp_iterations,
                    };
                    return Ok((solution, self.trace.unwrap_or_default()));
                }
                LpStatus::Optimal => {}
            }
            let values = outcome.values.expect("optimal LP carries values");
            let key = self.flip * outcome.objective.expect("optimal LP carries objective");
            // Node bounds never improve on the parent's; clamp LP round-off.
            let key = key.max(node.key);

            if self.can_prune(key) {
                self.record(&node, Some(key), NodeFate::Pruned);
                continue;
            }

            if let Some((set, split)) = self.violated_sos(&values) {
                self.record(&node, Some(key), NodeFate::BranchedOnSos);
                let set = &self.model.sos_sets[set];
                let (left, right) = sos_children(set, split);
                let right = self.child(&node, key, right);
                let left = self.child(&node, key, left);
                open.push(right);
                open.push(left);
                continue;
            }

            if let Some(j) = self.most_fractional(&values) {
                self.record(&node, Some(key), NodeFate::BranchedOnVariable);
                let x = values[j];
                let down = self.child(&node, key, vec![(j, f64::NEG_INFINITY, x.floor())]);
                let up = self.child(&node, key, vec![(j, x.ceil(), f64::INFINITY)]);
                open.push(down);
                open.push(up);
                continue;
            }

            self.record(&node, Some(key), NodeFate::Integral);
            let mut point = values;
            for (x, v) in point.iter_mut().zip(&self.model.vars) {
                if v.kind.is_discrete() {
                    *x = x.round();
                }
            }
            if let Some(last) = self.trace.as_mut().and_then(|t| t.last_mut()) {
                last.point = Some(point.clone());
            }
            // Recompute from the rounded point so objective and values agree.
            let key = self.flip * (self.model.objective_value(&point) - self.model.objective.constant);
            if self.incumbent.as_ref().is_none_or(|(best, _)| key < *best) {
                self.incumbent = Some((key, point));
            }
        }

        let open_best = open.iter().map(|n| n.key).min_by(f64::total_cmp);
        let solution = match self.incumbent.take() {
            Some((key, values)) => {
                let bound_key = open_best.map_or(key, |b| b.min(key));
                Solution {
                    status: if limit_hit && !open.is_empty() {
                        SolveStatus::Feasible
                    } else {
                        SolveStatus::Optimal
                    },
                    objective: Some(self.model.objective_value(&values)),
                    values,
                    bound: Some(self.to_objective(bound_key)),
                    nodes: self.nodes,
                    lp_iterations: self.lp_iterations,
                }
            }
            None => Solution {
                status: if limit_hit {
                    SolveStatus::NoSolution
                } else {
                    SolveStatus::Infeasible
                },
                objective: None,
                values: Vec::new(),
                bound: open_best
                    .filter(|b| b.is_finite())
                    .map(|b| self.to_objective(b)),
                nodes: self.nodes,
                lp_iterations: self.lp_iterations,
            },
        };
        Ok((solution, self.trace.unwrap_or_default()))
    }

    /// First violated SOS set and the member position to split after.
    fn violated_sos(&self, values: &[f64]) -> Option<(usize, usize)> {
        self.model
            .sos_sets
            .iter()
            .enumerate()
            .find(|(_, set)| !set.is_satisfied(values))
            .map(|(k, set)| (k, sos_split(set, values)))
    }

    /// Discrete variable farthest from integrality; lowest index wins ties.
    fn most_fractional(&self, values: &[f64]) -> Option<usize> {
        let mut best = None;
        let mut best_dist = INTEGRALITY_TOL;
        for (j, (v, &x)) in self.model.vars.iter().zip(values).enumerate() {
            if !v.kind.is_discrete() {
                continue;
            }
            let dist = (x - x.round()).abs();
            if dist > best_dist {
                best_dist = dist;
                best = Some(j);
            }
        }
        best
    }
}

/// Split position `r` for a violated set: the left child keeps members
/// `0..=r`, the right child keeps `r+1..` (SOS1) or `r..` (SOS2). `r` sits at
/// the weighted-average reference weight, clamped so that both children
/// exclude the current point.
fn sos_split(set: &SosSet, values: &[f64]) -> usize {
    let mag: Vec<f64> = set.members.iter().map(|&(v, _)| values[v].abs()).collect();
    let first = mag.iter().position(|&m| m > SOS_NONZERO_TOL).unwrap_or(0);
    let last = mag.iter().rposition(|&m| m > SOS_NONZERO_TOL).unwrap_or(0);
    let total: f64 = mag.iter().sum();
    let avg = set
        .members
        .iter()
        .zip(&mag)
        .map(|(&(_, w), m)| w * m)
        .sum::<f64>()
        / total;
    let r = set
        .members
        .iter()
        .rposition(|&(_, w)| w <= avg)
        .unwrap_or(0);
    match set.kind {
        SosKind::Sos1 => r.clamp(first, last - 1),
        SosKind::Sos2 => r.clamp(first + 1, last - 1),
    }
}

type Changes = Vec<(usize, f64, f64)>;

fn sos_children(set: &SosSet, r: usize) -> (Changes, Changes) {
    let fix = |k: usize| (set.members[k].0, 0.0, 0.0);
    let n = set.members.len();
    let left = (r + 1..n).map(fix).collect();
    let right = match set.kind {
        SosKind::Sos1 => (0..=r).map(fix).collect(),
        SosKind::Sos2 => (0..r).map(fix).collect(),
    };
    (left, right)
}

//! Dense-tableau, bounded-variable primal simplex.
//!
//! Every row `a·x (rel) b` gets a slack `s` so that `a·x + s = b`, with the
//! slack bounds encoding the relation (`≤` → `s ≥ 0`, `≥` → `s ≤ 0`,
//! `=` → `s = 0`). Nonbasic variables sit at one of their bounds (or at zero
//! when free), so variable bounds never turn into extra rows. Rows whose slack
//! cannot absorb the initial residual receive an artificial column; phase 1
//! drives those to zero, after which they are fixed at zero and phase 2
//! optimizes the real objective.
//!
//! Pricing is Dantzig's largest reduced cost. After
//! [`LpOptions::bland_after`] consecutive degenerate pivots the solver switches
//! to Bland's smallest-index rule for the rest of the phase, which rules out
//! cycling.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;
pub const OPTIMALITY_TOL: f64 = 1e-9;
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Phase-1 infeasibility above this is reported as `Infeasible`.
pub const PHASE1_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    /// Whether `lhs (rel) rhs` holds up to `tol`.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

/// One linear row: `Σ coef·x[var] (relation) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Self {
            terms,
            relation,
            rhs,
        }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub sense: Sense,
    /// `(lower, upper)` per variable; infinities are allowed.
    pub var_bounds: Vec<(f64, f64)>,
    pub rows: Vec<Row>,
}

impl LpProblem {
    /// An LP over `num_vars` nonnegative variables with a zero objective.
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            sense,
            var_bounds: vec![(0.0, f64::INFINITY); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(Row::new(terms, relation, rhs));
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(invalid(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        if self.var_bounds.len() != self.num_vars {
            return Err(invalid(format!(
                "{} bound pairs for {} variables",
                self.var_bounds.len(),
                self.num_vars
            )));
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!("objective coefficient {j} is not finite")));
        }
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(invalid(format!("variable {j} has unusable bounds [{lo}, {hi}]")));
            }
            if lo > hi {
                return Err(invalid(format!("variable {j} has lower {lo} > upper {hi}")));
            }
        }
        let mut seen = vec![usize::MAX; self.num_vars];
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(invalid(format!("row {i} has a non-finite rhs")));
            }
            for &(j, a) in &row.terms {
                if j >= self.num_vars {
                    return Err(invalid(format!(
                        "row {i} references variable {j}, only {} exist",
                        self.num_vars
                    )));
                }
                if !a.is_finite() {
                    return Err(invalid(format!("row {i} has a non-finite coefficient")));
                }
                if seen[j] == i {
                    return Err(invalid(format!("row {i} lists variable {j} twice")));
                }
                seen[j] = i;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub max_iterations: usize,
    pub bland_after: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            bland_after: 1_000,
        }
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpOutcome> {
    solve_lp_with(problem, &LpOptions::default())
}

pub fn solve_lp_with(problem: &LpProblem, options: &LpOptions) -> Result<LpOutcome> {
    problem.validate()?;
    let mut tableau = Tableau::build(problem);
    let mut iterations = 0;

    if tableau.num_artificial > 0 {
        tableau.set_phase_costs(true, problem);
        let end = tableau.run(options, &mut iterations, false)?;
        debug_assert!(end != PhaseEnd::Unbounded);
        if tableau.artificial_infeasibility() > PHASE1_TOL {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                values: None,
                objective: None,
                iterations,
            });
        }
        tableau.retire_artificials();
    }

    tableau.set_phase_costs(false, problem);
    let end = tableau.run(options, &mut iterations, true)?;
    if end == PhaseEnd::Unbounded {
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            values: None,
            objective: None,
            iterations,
        });
    }

    let values = tableau.structural_values();
    let objective = problem
        .objective
        .iter()
        .zip(&values)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        values: Some(values),
        objective: Some(objective),
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ColState {
    Basic,
    AtLower,
    AtUpper,
    /// Free nonbasic variable parked at zero.
    AtZero,
}

#[derive(Debug, PartialEq, Eq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    num_structural: usize,
    num_artificial: usize,
    /// Row-major `rows × cols` matrix `B⁻¹A`.
    a: Vec<f64>,
    /// Values of the basic variables, one per row.
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<ColState>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    /// Columns that can still change: basic, or nonbasic with `lo < hi`.
    live: Vec<usize>,
}

impl Tableau {
    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars;
        let m = p.rows.len();

        let mut lo = Vec::with_capacity(n + 2 * m);
        let mut hi = Vec::with_capacity(n + 2 * m);
        let mut state = Vec::with_capacity(n + 2 * m);
        let mut x_nb = Vec::with_capacity(n);
        for &(l, u) in &p.var_bounds {
            lo.push(l);
            hi.push(u);
            let (s, v) = if l.is_finite() {
                (ColState::AtLower, l)
            } else if u.is_finite() {
                (ColState::AtUpper, u)
            } else {
                (ColState::AtZero, 0.0)
            };
            state.push(s);
            x_nb.push(v);
        }

        // Residual each slack must absorb, and which rows need an artificial.
        let mut residual = Vec::with_capacity(m);
        let mut needs_art = Vec::with_capacity(m);
        for row in &p.rows {
            let r = row.rhs - row.terms.iter().map(|&(j, a)| a * x_nb[j]).sum::<f64>();
            let (sl, su) = slack_bounds(row.relation);
            residual.push(r);
            needs_art.push(r < sl || r > su);
            lo.push(sl);
            hi.push(su);
            state.push(ColState::Basic);
        }
        let num_artificial = needs_art.iter().filter(|&&b| b).count();
        let cols = n + m + num_artificial;

        let mut a = vec![0.0; m * cols];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut art = n + m;
        for (i, row) in p.rows.iter().enumerate() {
            let slack = n + i;
            let r = residual[i];
            let line = &mut a[i * cols..(i + 1) * cols];
            if needs_art[i] {
                let s0 = r.clamp(lo[slack], hi[slack]);
                let sign = if r > s0 { 1.0 } else { -1.0 };
                for &(j, c) in &row.terms {
                    line[j] = sign * c;
                }
                line[slack] = sign;
                line[art] = 1.0;
                state[slack] = if s0 == lo[slack] {
                    ColState::AtLower
                } else {
                    ColState::AtUpper
                };
                lo.push(0.0);
                hi.push(f64::INFINITY);
                state.push(ColState::Basic);
                beta[i] = (r - s0).abs();
                basis[i] = art;
                art += 1;
            } else {
                for &(j, c) in &row.terms {
                    line[j] = c;
                }
                line[slack] = 1.0;
                beta[i] = r;
                basis[i] = slack;
            }
        }

        let mut tableau = Self {
            rows: m,
            cols,
            num_structural: n,
            num_artificial,
            a,
            beta,
            basis,
            state,
            lo,
            hi,
            cost: vec![0.0; cols],
            reduced: vec![0.0; cols],
            live: Vec::new(),
        };
        tableau.refresh_live();
        tableau
    }

    fn refresh_live(&mut self) {
        self.live = (0..self.cols)
            .filter(|&j| self.state[j] == ColState::Basic || self.lo[j] < self.hi[j])
            .collect();
    }

    fn set_phase_costs(&mut self, phase_one: bool, p: &LpProblem) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        if phase_one {
            let first_art = self.num_structural + self.rows;
            self.cost[first_art..].iter_mut().for_each(|c| *c = 1.0);
        } else {
            let flip = match p.sense {
                Sense::Minimize => 1.0,
                Sense::Maximize => -1.0,
            };
            for (c, &o) in self.cost.iter_mut().zip(&p.objective) {
                *c = flip * o;
            }
        }
        for j in 0..self.cols {
            self.reduced[j] = self.cost[j];
        }
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let line = &self.a[i * self.cols..(i + 1) * self.cols];
                for &j in &self.live {
                    self.reduced[j] -= cb * line[j];
                }
            }
        }
        for i in 0..self.rows {
            self.reduced[self.basis[i]] = 0.0;
        }
    }

    fn artificial_infeasibility(&self) -> f64 {
        let first_art = self.num_structural + self.rows;
        (0..self.rows)
            .filter(|&i| self.basis[i] >= first_art)
            .map(|i| self.beta[i].max(0.0))
            .sum()
    }

    /// Fixes every artificial at zero; basic ones stay in the basis at value ~0
    /// and leave through the ordinary ratio test.
    fn retire_artificials(&mut self) {
        let first_art = self.num_structural + self.rows;
        for j in first_art..self.cols {
            self.hi[j] = 0.0;
        }
        for i in 0..self.rows {
            if self.basis[i] >= first_art {
                self.beta[i] = 0.0;
            }
        }
        self.refresh_live();
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            ColState::AtLower => self.lo[j],
            ColState::AtUpper => self.hi[j],
            ColState::AtZero | ColState::Basic => 0.0,
        }
    }

    fn structural_values(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.num_structural)
            .map(|j| self.nonbasic_value(j))
            .collect();
        for i in 0..self.rows {
            let j = self.basis[i];
            if j < self.num_structural {
                // Snap round-off just outside a bound back onto it.
                x[j] = self.beta[i].clamp(self.lo[j], self.hi[j]);
            }
        }
        x
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for &j in &self.live {
            let d = self.reduced[j];
            let dir = match self.state[j] {
                ColState::Basic => continue,
                ColState::AtLower if d < -OPTIMALITY_TOL => 1.0,
                ColState::AtUpper if d > OPTIMALITY_TOL => -1.0,
                ColState::AtZero if d.abs() > OPTIMALITY_TOL => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn run(&mut self, options: &LpOptions, iterations: &mut usize, phase_two: bool) -> Result<PhaseEnd> {
        let mut degenerate_streak = 0;
        let mut bland = false;
        loop {
            let Some((q, dir)) = self.choose_entering(bland) else {
                return Ok(PhaseEnd::Optimal);
            };
            if *iterations >= options.max_iterations {
                return Err(Error::IterationLimit {
                    limit: options.max_iterations,
                });
            }
            *iterations += 1;

            // Ratio test over basic variables.
            let mut theta = f64::INFINITY;
            let mut leave: Option<usize> = None;
            let mut leave_alpha = 0.0;
            for i in 0..self.rows {
                let alpha = self.a[i * self.cols + q];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let rate = -dir * alpha;
                let b = self.basis[i];
                let limit = if rate < 0.0 {
                    if self.lo[b] == f64::NEG_INFINITY {
                        continue;
                    }
                    (self.beta[i] - self.lo[b]) / -rate
                } else {
                    if self.hi[b] == f64::INFINITY {
                        continue;
                    }
                    (self.hi[b] - self.beta[i]) / rate
                };
                let limit = limit.max(0.0);
                let better = match leave {
                    None => true,
                    Some(prev) => {
                        if limit < theta {
                            true
                        } else if limit == theta {
                            if bland {
                                b < self.basis[prev]
                            } else {
                                alpha.abs() > leave_alpha
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = limit;
                    leave = Some(i);
                    leave_alpha = alpha.abs();
                }
            }

            let span = self.hi[q] - self.lo[q];
            if span.is_finite() && span <= theta {
                // Bound flip: the entering variable hits its own opposite bound.
                self.shift_basics(q, dir, span);
                self.state[q] = if dir > 0.0 {
                    ColState::AtUpper
                } else {
                    ColState::AtLower
                };
                degenerate_streak = 0;
                continue;
            }

            let Some(p) = leave else {
                if phase_two {
                    return Ok(PhaseEnd::Unbounded);
                }
                // Phase 1 is bounded below by zero; an unbounded ray here is
                // numerical noise.
                return Err(invalid("phase 1 reported an unbounded ray"));
            };

            if theta <= 1e-12 {
                degenerate_streak += 1;
                if degenerate_streak >= options.bland_after {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
            }
            self.pivot(p, q, dir, theta);
        }
    }

    fn shift_basics(&mut self, q: usize, dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        for i in 0..self.rows {
            let alpha = self.a[i * self.cols + q];
            if alpha != 0.0 {
                self.beta[i] -= dir * alpha * theta;
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize, dir: f64, theta: f64) {
        let cols = self.cols;
        let entering_value = self.nonbasic_value(q) + dir * theta;
        self.shift_basics(q, dir, theta);

        let leaving = self.basis[p];
        let alpha_p = self.a[p * cols + q];
        let rate = -dir * alpha_p;
        self.state[leaving] = if rate < 0.0 {
            ColState::AtLower
        } else {
            ColState::AtUpper
        };
        self.state[q] = ColState::Basic;
        self.basis[p] = q;
        self.beta[p] = entering_value;

        let inv = 1.0 / alpha_p;
        {
            let line = &mut self.a[p * cols..(p + 1) * cols];
            for &j in &self.live {
                line[j] *= inv;
            }
            line[q] = 1.0;
        }
        let (before, rest) = self.a.split_at_mut(p * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for line in before
            .chunks_exact_mut(cols)
            .chain(after.chunks_exact_mut(cols))
        {
            let f = line[q];
            if f != 0.0 {
                for &j in &self.live {
                    line[j] -= f * pivot_row[j];
                }
                line[q] = 0.0;
            }
        }
        let dq = self.reduced[q];
        if dq != 0.0 {
            for &j in &self.live {
                self.reduced[j] -= dq * pivot_row[j];
            }
            self.reduced[q] = 0.0;
        }

        if self.lo[leaving] == self.hi[leaving] {
            self.live.retain(|&j| j != leaving);
        }
    }
}

fn slack_bounds(relation: Relation) -> (f64, f64) {
    match relation {
        Relation::Le => (0.0, f64::INFINITY),
        Relation::Ge => (f64::NEG_INFINITY, 0.0),
        Relation::Eq => (0.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn bound_attained_without_rows() {
        let mut p = LpProblem::new(1, Sense::Maximize);
        p.objective[0] = 1.0;
        p.var_bounds[0] = (0.0, 5.0);
        let out = solve_lp(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_close(out.values.unwrap()[0], 5.0);
        assert_close(out.objective.unwrap(), 5.0);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut p = LpProblem::new(1, Sense::Maximize);
        p.var_bounds[0] = (f64::NEG_INFINITY, f64::INFINITY);
        p.add_row(vec![(0, 1.0)], Relation::Ge, 1.0);
        p.add_row(vec![(0, 1.0)], Relation::Le, 0.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn knapsack_relaxation() {
        let p_ = [10.0, 13.0, 18.0, 31.0, 7.0, 15.0];
        let w = [11.0, 15.0, 20.0, 35.0, 10.0, 33.0];
        let mut p = LpProblem::new(6, Sense::Maximize);
        p.objective = p_.to_vec();
        p.var_bounds = vec![(0.0, 1.0); 6];
        p.add_row(w.iter().copied().enumerate().collect(), Relation::Le, 47.0);
        let out = solve_lp(&p).unwrap();
        assert_close(out.objective.unwrap(), 10.0 + 18.0 + 31.0 * 16.0 / 35.0);
    }

    #[test]
    fn unbounded_ray() {
        let mut p = LpProblem::new(2, Sense::Maximize);
        p.objective = vec![1.0, 1.0];
        p.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Le, 3.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_goes_negative() {
        // minimize x subject to x >= -4, x free
        let mut p = LpProblem::new(1, Sense::Minimize);
        p.objective[0] = 1.0;
        p.var_bounds[0] = (f64::NEG_INFINITY, f64::INFINITY);
        p.add_row(vec![(0, 1.0)], Relation::Ge, -4.0);
        let out = solve_lp(&p).unwrap();
        assert_close(out.values.unwrap()[0], -4.0);
    }

    #[test]
    fn upper_bounded_only_variable() {
        // maximize -x with x <= 3 and no lower bound, x >= -2 from a row
        let mut p = LpProblem::new(1, Sense::Maximize);
        p.objective[0] = -1.0;
        p.var_bounds[0] = (f64::NEG_INFINITY, 3.0);
        p.add_row(vec![(0, 1.0)], Relation::Ge, -2.0);
        let out = solve_lp(&p).unwrap();
        assert_close(out.values.unwrap()[0], -2.0);
    }

    #[test]
    fn equality_rows_need_phase_one() {
        // min x + 2y, x + y = 4, x - y = 2  => x=3, y=1
        let mut p = LpProblem::new(2, Sense::Minimize);
        p.objective = vec![1.0, 2.0];
        p.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 4.0);
        p.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Eq, 2.0);
        let out = solve_lp(&p).unwrap();
        let v = out.values.unwrap();
        assert_close(v[0], 3.0);
        assert_close(v[1], 1.0);
        assert_close(out.objective.unwrap(), 5.0);
    }

    #[test]
    fn empty_row_with_negative_rhs_is_infeasible() {
        let mut p = LpProblem::new(1, Sense::Minimize);
        p.add_row(vec![], Relation::Le, -1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn no_variables_is_trivially_optimal() {
        let p = LpProblem::new(0, Sense::Maximize);
        let out = solve_lp(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.objective, Some(0.0));
    }

    #[test]
    fn malformed_problems_are_rejected() {
        let mut p = LpProblem::new(2, Sense::Minimize);
        p.add_row(vec![(2, 1.0)], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::InvalidInput(_))));

        let mut p = LpProblem::new(1, Sense::Minimize);
        p.var_bounds[0] = (2.0, 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::InvalidInput(_))));

        let mut p = LpProblem::new(2, Sense::Minimize);
        p.add_row(vec![(0, 1.0), (0, 2.0)], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn iteration_limit_is_a_resource_error() {
        let mut p = LpProblem::new(3, Sense::Maximize);
        p.objective = vec![1.0, 1.0, 1.0];
        for j in 0..3 {
            p.add_row(vec![(j, 1.0)], Relation::Le, 1.0);
        }
        let opts = LpOptions {
            max_iterations: 1,
            ..LpOptions::default()
        };
        assert!(matches!(
            solve_lp_with(&p, &opts),
            Err(Error::IterationLimit { limit: 1 })
        ));
    }

    #[test]
    fn degenerate_problem_terminates_under_bland() {
        // Beale's classic cycling example (cycles under naive Dantzig + lowest
        // index ties).
        let mut p = LpProblem::new(4, Sense::Minimize);
        p.objective = vec![-0.75, 150.0, -0.02, 6.0];
        p.add_row(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Relation::Le, 0.0);
        p.add_row(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Relation::Le, 0.0);
        p.add_row(vec![(2, 1.0)], Relation::Le, 1.0);
        let opts = LpOptions {
            bland_after: 1,
            ..LpOptions::default()
        };
        let out = solve_lp_with(&p, &opts).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_close(out.objective.unwrap(), -0.05);
    }
}

//! Shortest collection route over production cells, Miller–Tucker–Zemlin
//! formulation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mip::{solve_mip, Model, Relation, Sense, SolveParams, Solution, VarKind};

/// Node labels plus a distance matrix. The first node is the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    pub names: Vec<String>,
    /// Full `n × n` matrix, zero diagonal.
    pub dist: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
struct TspFile {
    names: Vec<String>,
    #[serde(default)]
    tri: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
}

impl TspInstance {
    pub fn from_triangular(names: Vec<String>, tri: &[Vec<f64>]) -> Result<Self> {
        if names.len() != tri.len() {
            return Err(invalid(format!(
                "{} names but {} triangular rows",
                names.len(),
                tri.len()
            )));
        }
        let inst = Self {
            names,
            dist: expand_triangular(tri)?,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_matrix(names: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let inst = Self { names, dist };
        inst.validate()?;
        Ok(inst)
    }

    /// Accepts `{"names", "tri"}` or `{"names", "matrix"}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TspFile = serde_json::from_str(text)?;
        match (file.tri, file.matrix) {
            (Some(tri), None) => Self::from_triangular(file.names, &tri),
            (None, Some(m)) => Self::from_matrix(file.names, m),
            _ => Err(invalid("TSP instance needs exactly one of \"tri\" or \"matrix\"")),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.names.len();
        if self.dist.len() != n || self.dist.iter().any(|r| r.len() != n) {
            return Err(invalid(format!("distance matrix must be {n} × {n}")));
        }
        for (i, row) in self.dist.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(invalid(format!("distance ({i}, {j}) must be finite and nonnegative")));
                }
                if i == j && d != 0.0 {
                    return Err(invalid(format!("diagonal entry {i} must be zero")));
                }
            }
        }
        Ok(())
    }
}

/// Expands strictly-upper-triangular rows (row `i` holds distances to nodes
/// `i+1..n`) into a symmetric matrix.
pub fn expand_triangular(tri: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = tri.len();
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in tri.iter().enumerate() {
        if row.len() != n - 1 - i {
            return Err(invalid(format!(
                "triangular row {i} has {} entries, expected {}",
                row.len(),
                n - 1 - i
            )));
        }
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    /// Node indices, starting and ending at the depot.
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    pub fn reversed(&self) -> Tour {
        let mut order = self.order.clone();
        order.reverse();
        Tour {
            order,
            length: self.length,
        }
    }

    pub fn length_in(&self, inst: &TspInstance) -> f64 {
        self.order.windows(2).map(|w| inst.dist[w[0]][w[1]]).sum()
    }

    pub fn verify(&self, inst: &TspInstance) -> Result<()> {
        let n = inst.len();
        if self.order.len() != n + 1 || self.order.first() != Some(&0) || self.order.last() != Some(&0) {
            return Err(Error::Verify("tour must start and end at the depot and have n + 1 stops".into()));
        }
        let mut seen = vec![false; n];
        for &v in &self.order[..n] {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Verify(format!("node {v} is out of range or visited twice")));
            }
        }
        let length = self.length_in(inst);
        if (length - self.length).abs() > 1e-6 {
            return Err(Error::Verify(format!(
                "reported length {} differs from replayed {length}",
                self.length
            )));
        }
        Ok(())
    }
}

/// Variable indices of a built TSP model.
#[derive(Debug, Clone, PartialEq)]
pub struct TspVars {
    /// `arc[i][j]` is the binary for travelling `i → j`; `None` on the diagonal.
    pub arc: Vec<Vec<Option<usize>>>,
    /// `order[i]` is the MTZ position variable; `None` for the depot.
    pub order: Vec<Option<usize>>,
}

pub fn build_tsp(inst: &TspInstance) -> Result<(Model, TspVars)> {
    inst.validate()?;
    let n = inst.len();
    if n < 2 {
        return Err(invalid("a tour needs at least two nodes"));
    }
    let mut model = Model::new(Sense::Minimize);
    let mut arc = vec![vec![None; n]; n];
    let mut objective = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = model.add_binary(format!("x_{i}_{j}"))?;
                arc[i][j] = Some(v);
                objective.push((v, inst.dist[i][j]));
            }
        }
    }
    let mut order = vec![None; n];
    for (i, slot) in order.iter_mut().enumerate().skip(1) {
        let last = (n - 1) as f64;
        *slot = Some(model.add_variable(format!("y_{i}"), 1.0, last, VarKind::Continuous)?);
    }
    model.set_objective(objective, 0.0)?;

    for i in 0..n {
        let out = (0..n).filter_map(|j| arc[i][j]).map(|v| (v, 1.0)).collect();
        model.add_linear_constraint(out, Relation::Eq, 1.0)?;
    }
    for j in 0..n {
        let inflow = (0..n).filter_map(|i| arc[i][j]).map(|v| (v, 1.0)).collect();
        model.add_linear_constraint(inflow, Relation::Eq, 1.0)?;
    }
    // Lifted MTZ order rows: y_i − y_j + (n−1)·x_ij + (n−3)·x_ji ≤ n − 2.
    // With x_ij = 1 this is y_j ≥ y_i + 1; the x_ji term also rules out
    // two-cycles between non-depot nodes in the LP relaxation.
    let nf = n as f64;
    for i in 1..n {
        for j in 1..n {
            if i == j {
                continue;
            }
            let (yi, yj) = (order[i].unwrap(), order[j].unwrap());
            let (xij, xji) = (arc[i][j].unwrap(), arc[j][i].unwrap());
            let mut terms = vec![(yi, 1.0), (yj, -1.0), (xij, nf - 1.0)];
            if n > 3 {
                terms.push((xji, nf - 3.0));
            }
            model.add_linear_constraint(terms, Relation::Le, nf - 2.0)?;
        }
    }
    Ok((model, TspVars { arc, order }))
}

pub fn decode_tour(solution: &Solution, vars: &TspVars, inst: &TspInstance) -> Result<Tour> {
    if !solution.has_incumbent() {
        return Err(Error::NoIncumbent);
    }
    let n = inst.len();
    let mut order = Vec::with_capacity(n + 1);
    let mut seen = vec![false; n];
    let mut at = 0;
    for _ in 0..n {
        if std::mem::replace(&mut seen[at], true) {
            return Err(Error::Decode(format!("arcs revisit node {at} before covering all nodes")));
        }
        order.push(at);
        let next: Vec<usize> = (0..n)
            .filter(|&j| vars.arc[at][j].is_some_and(|v| solution.values[v] > 0.5))
            .collect();
        match next.as_slice() {
            [j] => at = *j,
            _ => return Err(Error::Decode(format!("node {at} has {} outgoing arcs", next.len()))),
        }
    }
    if at != 0 {
        return Err(Error::Decode("arcs do not close a single cycle".into()));
    }
    order.push(0);
    let mut tour = Tour { order, length: 0.0 };
    tour.length = tour.length_in(inst);
    Ok(tour)
}

pub fn solve_tsp(inst: &TspInstance, params: &SolveParams) -> Result<(Solution, Option<Tour>)> {
    let (model, vars) = build_tsp(inst)?;
    let solution = solve_mip(&model, params)?;
    let tour = if solution.has_incumbent() {
        Some(decode_tour(&solution, &vars, inst)?)
    } else {
        None
    };
    Ok((solution, tour))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn two_node_expansion() {
        let m = expand_triangular(&[vec![5.0], vec![]]).unwrap();
        assert_eq!(m, vec![vec![0.0, 5.0], vec![5.0, 0.0]]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(expand_triangular(&[vec![5.0, 1.0], vec![]]).is_err());
        assert!(TspInstance::from_json(r#"{"names": ["a", "b"], "tri": [[1], [2]]}"#).is_err());
    }

    #[test]
    fn forced_two_node_tour() {
        let inst = TspInstance::from_triangular(names(2), &[vec![5.0], vec![]]).unwrap();
        let (model, vars) = build_tsp(&inst).unwrap();
        assert_eq!(vars.arc.iter().flatten().flatten().count(), 2);
        assert_eq!(model.constraints.len(), 4);
        let (s, tour) = solve_tsp(&inst, &SolveParams::default()).unwrap();
        assert_eq!(s.objective, Some(10.0));
        let tour = tour.unwrap();
        assert_eq!(tour.order, vec![0, 1, 0]);
        assert_eq!(tour.length, 10.0);
    }

    #[test]
    fn three_node_cycle() {
        let inst = TspInstance::from_triangular(names(3), &[vec![3.0, 4.0], vec![5.0], vec![]]).unwrap();
        let (_, tour) = solve_tsp(&inst, &SolveParams::default()).unwrap();
        let tour = tour.unwrap();
        assert_eq!(tour.length, 12.0);
        tour.verify(&inst).unwrap();
        assert_eq!(tour.reversed().length_in(&inst), 12.0);
    }

    #[test]
    fn model_counts_follow_n() {
        let n = 6;
        let tri: Vec<Vec<f64>> = (0..n).map(|i| vec![1.0; n - 1 - i]).collect();
        let inst = TspInstance::from_triangular(names(n), &tri).unwrap();
        let (m, vars) = build_tsp(&inst).unwrap();
        let binaries = m.vars.iter().filter(|v| v.kind == VarKind::Binary).count();
        assert_eq!(binaries, n * (n - 1));
        assert_eq!(vars.order.iter().flatten().count(), n - 1);
        assert_eq!(m.constraints.len(), 2 * n + (n - 1) * (n - 2));
    }

    #[test]
    fn too_small() {
        let inst = TspInstance::from_matrix(names(1), vec![vec![0.0]]).unwrap();
        assert!(build_tsp(&inst).is_err());
    }

    #[test]
    fn asymmetric_matrix_variant() {
        let text = r#"{"names": ["a", "b", "c"], "matrix": [[0, 1, 9], [9, 0, 1], [1, 9, 0]]}"#;
        let inst = TspInstance::from_json(text).unwrap();
        let (_, tour) = solve_tsp(&inst, &SolveParams::default()).unwrap();
        assert_eq!(tour.unwrap().length, 3.0);
    }

    #[test]
    fn subtour_is_a_decode_error() {
        // 4 nodes, arcs 0→1→0 and 2→3→2.
        let tri: Vec<Vec<f64>> = (0..4).map(|i| vec![1.0; 3 - i]).collect();
        let inst = TspInstance::from_triangular(names(4), &tri).unwrap();
        let (m, vars) = build_tsp(&inst).unwrap();
        let mut values = vec![0.0; m.num_vars()];
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            values[vars.arc[i][j].unwrap()] = 1.0;
        }
        let s = Solution {
            status: crate::mip::SolveStatus::Optimal,
            objective: Some(4.0),
            values,
            bound: None,
            nodes: 0,
            lp_iterations: 0,
        };
        assert!(matches!(decode_tour(&s, &vars, &inst), Err(Error::Decode(_))));
    }
}

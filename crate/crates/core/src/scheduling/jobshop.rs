use serde::{Deserialize, Serialize};

use super::{Schedule, Task};
use crate::error::{invalid, Error, Result};
use crate::mip::{solve_mip, Model, Relation, Sense, SolveParams, Solution, VarKind};

/// Job-shop instance with 0-based machine routes.
#[derive(Debug, Clone, PartialEq)]
pub struct JobShopInstance {
    /// `times[job][machine]`: processing time of `job` on `machine`.
    pub times: Vec<Vec<f64>>,
    /// `routes[job][k]`: the k-th machine `job` visits.
    pub routes: Vec<Vec<usize>>,
}

/// File layout; machine ids are 1-based.
#[derive(Debug, Serialize, Deserialize)]
struct JobShopFile {
    times: Vec<Vec<f64>>,
    machines: Vec<Vec<usize>>,
}

impl JobShopInstance {
    /// Builds from the file layout with 1-based machine ids.
    pub fn new(times: Vec<Vec<f64>>, machines_one_based: Vec<Vec<usize>>) -> Result<Self> {
        let mut routes = Vec::with_capacity(machines_one_based.len());
        for (j, row) in machines_one_based.iter().enumerate() {
            let route = row
                .iter()
                .map(|&m| {
                    m.checked_sub(1)
                        .ok_or_else(|| invalid(format!("job {j}: machine ids are 1-based")))
                })
                .collect::<Result<Vec<_>>>()?;
            routes.push(route);
        }
        let inst = Self { times, routes };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: JobShopFile = serde_json::from_str(text)?;
        Self::new(file.times, file.machines)
    }

    pub fn to_json(&self) -> String {
        let file = JobShopFile {
            times: self.times.clone(),
            machines: self
                .routes
                .iter()
                .map(|r| r.iter().map(|m| m + 1).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("plain data serializes")
    }

    pub fn num_jobs(&self) -> usize {
        self.times.len()
    }

    pub fn num_machines(&self) -> usize {
        self.times.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        let m = self.num_machines();
        if self.routes.len() != n {
            return Err(invalid(format!("{} routes for {n} jobs", self.routes.len())));
        }
        for (j, (t, route)) in self.times.iter().zip(&self.routes).enumerate() {
            if t.len() != m {
                return Err(invalid(format!("job {j} has {} times, expected {m}", t.len())));
            }
            if t.iter().any(|&p| !p.is_finite() || p < 0.0) {
                return Err(invalid(format!("job {j} has a negative or non-finite time")));
            }
            let mut seen = vec![false; m];
            if route.len() != m
                || route
                    .iter()
                    .any(|&k| k >= m || std::mem::replace(&mut seen[k], true))
            {
                return Err(invalid(format!("job {j} route is not a permutation of the machines")));
            }
        }
        Ok(())
    }

    /// Sum of all processing times; a valid disjunctive big-M.
    pub fn total_time(&self) -> f64 {
        self.times.iter().flatten().sum()
    }

    /// Checks routes, machine exclusivity and the reported makespan.
    pub fn verify(&self, schedule: &Schedule) -> Result<()> {
        let (n, m) = (self.num_jobs(), self.num_machines());
        let mut start = vec![vec![None; m]; n];
        for t in &schedule.tasks {
            let machine = t
                .machine
                .filter(|&k| k < m && t.job < n)
                .ok_or_else(|| Error::Verify("task with unknown job or machine".into()))?;
            if start[t.job][machine].replace(t.start).is_some() {
                return Err(Error::Verify(format!("job {} visits machine {machine} twice", t.job)));
            }
            if t.start < -1e-9 || (t.duration - self.times[t.job][machine]).abs() > 1e-9 {
                return Err(Error::Verify(format!("task ({}, {machine}) has a bad start or duration", t.job)));
            }
        }
        let start: Vec<Vec<f64>> = start
            .into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Verify("some operation is not scheduled".into()))?;
        for (j, route) in self.routes.iter().enumerate() {
            for w in route.windows(2) {
                if start[j][w[1]] + 1e-6 < start[j][w[0]] + self.times[j][w[0]] {
                    return Err(Error::Verify(format!("job {j} breaks its machine order")));
                }
            }
        }
        for k in 0..m {
            for a in 0..n {
                for b in a + 1..n {
                    let (sa, sb) = (start[a][k], start[b][k]);
                    let (ea, eb) = (sa + self.times[a][k], sb + self.times[b][k]);
                    if sa.max(sb) + 1e-6 < ea.min(eb) {
                        return Err(Error::Verify(format!("jobs {a} and {b} overlap on machine {k}")));
                    }
                }
            }
        }
        let makespan = schedule.tasks.iter().map(Task::end).fold(0.0, f64::max);
        if (makespan - schedule.makespan).abs() > 1e-6 {
            return Err(Error::Verify("reported makespan does not match the tasks".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobShopVars {
    /// `start[machine][job]`.
    pub start: Vec<Vec<usize>>,
    /// `((machine, j, k), var)` for `j < k`; the binary is 1 when `j` runs
    /// before `k` on `machine`.
    pub order: Vec<((usize, usize, usize), usize)>,
    pub makespan: usize,
}

pub fn build_jobshop(inst: &JobShopInstance) -> Result<(Model, JobShopVars)> {
    inst.validate()?;
    let (n, m) = (inst.num_jobs(), inst.num_machines());
    let big_m = inst.total_time();
    let p = |machine: usize, job: usize| inst.times[job][machine];

    let mut model = Model::new(Sense::Minimize);
    let start = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| model.add_variable(format!("s_{i}_{j}"), 0.0, f64::INFINITY, VarKind::Continuous))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut order = Vec::new();
    for i in 0..m {
        for j in 0..n {
            for k in j + 1..n {
                order.push(((i, j, k), model.add_binary(format!("y_{i}_{j}_{k}"))?));
            }
        }
    }
    let makespan = model.add_variable("C", 0.0, f64::INFINITY, VarKind::Continuous)?;
    model.set_objective(vec![(makespan, 1.0)], 0.0)?;

    for (j, route) in inst.routes.iter().enumerate() {
        for w in route.windows(2) {
            let (prev, next) = (w[0], w[1]);
            model.add_linear_constraint(
                vec![(start[next][j], 1.0), (start[prev][j], -1.0)],
                Relation::Ge,
                p(prev, j),
            )?;
        }
        if let Some(&last) = route.last() {
            model.add_linear_constraint(vec![(makespan, 1.0), (start[last][j], -1.0)], Relation::Ge, p(last, j))?;
        }
    }
    for &((i, j, k), y) in &order {
        // y = 0: k before j.
        model.add_linear_constraint(
            vec![(start[i][j], 1.0), (start[i][k], -1.0), (y, big_m)],
            Relation::Ge,
            p(i, k),
        )?;
        // y = 1: j before k.
        model.add_linear_constraint(
            vec![(start[i][k], 1.0), (start[i][j], -1.0), (y, -big_m)],
            Relation::Ge,
            p(i, j) - big_m,
        )?;
    }
    Ok((
        model,
        JobShopVars {
            start,
            order,
            makespan,
        },
    ))
}

pub fn decode_jobshop(solution: &Solution, vars: &JobShopVars, inst: &JobShopInstance) -> Result<Schedule> {
    let Some(objective) = solution.objective else {
        return Err(Error::NoIncumbent);
    };
    let mut tasks = Vec::with_capacity(inst.num_jobs() * inst.num_machines());
    for (j, route) in inst.routes.iter().enumerate() {
        for &machine in route {
            tasks.push(Task {
                job: j,
                machine: Some(machine),
                start: solution.values[vars.start[machine][j]],
                duration: inst.times[j][machine],
                dummy: false,
            });
        }
    }
    let schedule = Schedule::new(tasks);
    inst.verify(&schedule).map_err(|e| Error::Decode(e.to_string()))?;
    if (schedule.makespan - objective).abs() > 1e-6 {
        return Err(Error::Decode(format!(
            "makespan {} differs from objective {objective}",
            schedule.makespan
        )));
    }
    Ok(schedule)
}

pub fn solve_jobshop(inst: &JobShopInstance, params: &SolveParams) -> Result<(Solution, Option<Schedule>)> {
    let (model, vars) = build_jobshop(inst)?;
    let solution = solve_mip(&model, params)?;
    let schedule = if solution.has_incumbent() {
        Some(decode_jobshop(&solution, &vars, inst)?)
    } else {
        None
    };
    Ok((solution, schedule))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> JobShopInstance {
        JobShopInstance::new(
            vec![vec![2.0, 1.0, 2.0], vec![1.0, 2.0, 2.0], vec![1.0, 2.0, 1.0]],
            vec![vec![3, 1, 2], vec![2, 3, 1], vec![3, 2, 1]],
        )
        .unwrap()
    }

    #[test]
    fn bundled_model_counts() {
        let (m, vars) = build_jobshop(&sample()).unwrap();
        assert_eq!(vars.start.iter().flatten().count(), 9);
        assert_eq!(vars.order.len(), 9);
        assert_eq!(m.num_vars(), 19);
        assert_eq!(m.vars.iter().filter(|v| v.kind == VarKind::Binary).count(), 9);
    }

    #[test]
    fn bundled_makespan_is_seven() {
        let (s, schedule) = solve_jobshop(&sample(), &SolveParams::default()).unwrap();
        assert_eq!(s.objective, Some(7.0));
        assert_eq!(schedule.unwrap().makespan, 7.0);
    }

    #[test]
    fn single_job_runs_serially() {
        let inst = JobShopInstance::new(vec![vec![2.0, 3.0]], vec![vec![1, 2]]).unwrap();
        let (_, schedule) = solve_jobshop(&inst, &SolveParams::default()).unwrap();
        let schedule = schedule.unwrap();
        assert_eq!(schedule.makespan, 5.0);
        assert_eq!(schedule.tasks[0].start, 0.0);
        assert_eq!(schedule.tasks[1].start, 2.0);
    }

    #[test]
    fn shared_machine_sums_durations() {
        let inst = JobShopInstance::new(vec![vec![2.0], vec![3.0]], vec![vec![1], vec![1]]).unwrap();
        let (s, _) = solve_jobshop(&inst, &SolveParams::default()).unwrap();
        assert_eq!(s.objective, Some(5.0));
    }

    #[test]
    fn bad_routes_rejected() {
        assert!(JobShopInstance::new(vec![vec![1.0, 1.0]], vec![vec![1, 1]]).is_err());
        assert!(JobShopInstance::new(vec![vec![1.0, 1.0]], vec![vec![0, 1]]).is_err());
        assert!(JobShopInstance::new(vec![vec![1.0, 1.0]], vec![vec![1, 3]]).is_err());
        assert!(JobShopInstance::new(vec![vec![1.0, -1.0]], vec![vec![1, 2]]).is_err());
    }

    #[test]
    fn json_round_trip_keeps_one_based_ids() {
        let inst = sample();
        let back = JobShopInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(inst.routes[0], vec![2, 0, 1]);
    }
}

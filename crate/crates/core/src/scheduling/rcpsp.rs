use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Schedule, Task};
use crate::error::{invalid, Error, Result};
use crate::mip::{solve_mip, Model, Relation, Sense, SolveParams, Solution, SosKind, VarKind};

/// Resource-constrained project.
///
/// Real jobs are numbered `1..=n`; `0` and `n + 1` are the zero-length start
/// and end markers. `durations[j - 1]` and `usages[j - 1][r]` describe real job
/// `j`. Precedence pairs may mention the markers; missing marker arcs are
/// added by [`RcpspInstance::network`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcpspInstance {
    pub durations: Vec<f64>,
    /// `[job][resource]` usage per time step.
    pub usages: Vec<Vec<f64>>,
    pub capacities: Vec<f64>,
    pub precedence: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

/// Normalized project network including both marker jobs.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    /// Duration per job `0..=n+1`.
    pub durations: Vec<usize>,
    /// Usage per job `0..=n+1` and resource.
    pub usages: Vec<Vec<f64>>,
    pub capacities: Vec<f64>,
    /// Deduplicated, sorted arcs, marker arcs included.
    pub arcs: Vec<(usize, usize)>,
    pub horizon: usize,
}

impl Network {
    pub fn num_jobs(&self) -> usize {
        self.durations.len()
    }

    pub fn end_job(&self) -> usize {
        self.durations.len() - 1
    }

    /// Jobs in a deterministic topological order (smallest ready id first).
    pub fn topological_order(&self) -> Vec<usize> {
        topological(self.num_jobs(), &self.arcs).expect("network is acyclic")
    }

    /// Longest path from the start of `j` to the start of the end marker.
    pub fn tails(&self) -> Vec<usize> {
        let order = self.topological_order();
        let mut tail = vec![0; self.num_jobs()];
        for &j in order.iter().rev() {
            let after = self
                .arcs
                .iter()
                .filter(|&&(a, _)| a == j)
                .map(|&(_, s)| tail[s])
                .max()
                .unwrap_or(0);
            tail[j] = self.durations[j] + after;
        }
        tail
    }

    /// Earliest start of each job from precedence alone.
    pub fn heads(&self) -> Vec<usize> {
        let mut head = vec![0; self.num_jobs()];
        for j in self.topological_order() {
            for &(_, s) in self.arcs.iter().filter(|&&(a, _)| a == j) {
                head[s] = head[s].max(head[j] + self.durations[j]);
            }
        }
        head
    }

    pub fn critical_path(&self) -> usize {
        self.tails()[0]
    }
}

fn topological(n: usize, arcs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0; n];
    for &(_, s) in arcs {
        indeg[s] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(j) = ready.pop_first() {
        order.push(j);
        for &(a, s) in arcs {
            if a == j {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

impl RcpspInstance {
    pub fn num_real_jobs(&self) -> usize {
        self.durations.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        self.network().map(|_| ())
    }

    pub fn network(&self) -> Result<Network> {
        let n = self.num_real_jobs();
        let res = self.capacities.len();
        if self.usages.len() != n {
            return Err(invalid(format!("{} usage rows for {n} jobs", self.usages.len())));
        }
        if let Some(row) = self.usages.iter().find(|r| r.len() != res) {
            return Err(invalid(format!(
                "usage row has {} entries for {res} resources",
                row.len()
            )));
        }
        if self
            .usages
            .iter()
            .flatten()
            .chain(&self.capacities)
            .any(|&v| !v.is_finite() || v < 0.0)
        {
            return Err(invalid("usages and capacities must be finite and nonnegative"));
        }
        let mut durations = vec![0usize];
        for &p in &self.durations {
            if !(p >= 0.0) || p.fract() != 0.0 || p > 1e6 {
                return Err(invalid(format!("duration {p} must be a nonnegative integer")));
            }
            durations.push(p as usize);
        }
        durations.push(0);
        let end = n + 1;

        let mut arcs = BTreeSet::new();
        for &(j, s) in &self.precedence {
            if j > end || s > end {
                return Err(invalid(format!("precedence ({j}, {s}) references an unknown job")));
            }
            if j == s {
                return Err(invalid(format!("job {j} cannot precede itself")));
            }
            if s == 0 {
                return Err(invalid("the start marker 0 cannot have a predecessor"));
            }
            if j == end {
                return Err(invalid(format!("the end marker {end} cannot have a successor")));
            }
            arcs.insert((j, s));
        }
        for job in 1..=n {
            if !arcs.iter().any(|&(_, s)| s == job) {
                arcs.insert((0, job));
            }
            if !arcs.iter().any(|&(j, _)| j == job) {
                arcs.insert((job, end));
            }
        }
        if n == 0 {
            arcs.insert((0, end));
        }
        let arcs: Vec<_> = arcs.into_iter().collect();
        if topological(n + 2, &arcs).is_none() {
            return Err(invalid("precedence graph has a cycle"));
        }

        let mut usages = vec![vec![0.0; res]];
        usages.extend(self.usages.iter().cloned());
        usages.push(vec![0.0; res]);
        let horizon = self.horizon.unwrap_or_else(|| durations.iter().sum());
        Ok(Network {
            durations,
            usages,
            capacities: self.capacities.clone(),
            arcs,
            horizon,
        })
    }

    /// Replays precedence and per-step resource usage of a decoded schedule.
    pub fn verify(&self, schedule: &Schedule) -> Result<()> {
        let net = self.network()?;
        let mut start = vec![None; net.num_jobs()];
        for t in &schedule.tasks {
            if t.job >= net.num_jobs() || start[t.job].is_some() {
                return Err(Error::Verify(format!("job {} is unknown or scheduled twice", t.job)));
            }
            if t.start < -1e-9 {
                return Err(Error::Verify(format!("job {} starts before 0", t.job)));
            }
            if (t.duration - net.durations[t.job] as f64).abs() > 1e-9 {
                return Err(Error::Verify(format!("job {} has the wrong duration", t.job)));
            }
            start[t.job] = Some(t.start);
        }
        let start: Vec<f64> = start
            .into_iter()
            .enumerate()
            .map(|(j, s)| s.ok_or_else(|| Error::Verify(format!("job {j} has no start"))))
            .collect::<Result<_>>()?;
        for &(j, s) in &net.arcs {
            if start[s] + 1e-6 < start[j] + net.durations[j] as f64 {
                return Err(Error::Verify(format!("job {s} starts before job {j} finishes")));
            }
        }
        let last = start
            .iter()
            .zip(&net.durations)
            .map(|(s, &p)| s + p as f64)
            .fold(0.0, f64::max)
            .ceil() as usize;
        for t in 0..last {
            let tf = t as f64;
            for (r, &cap) in net.capacities.iter().enumerate() {
                let used: f64 = (0..net.num_jobs())
                    .filter(|&j| start[j] <= tf + 1e-9 && tf + 1e-9 < start[j] + net.durations[j] as f64)
                    .map(|j| net.usages[j][r])
                    .sum();
                if used > cap + 1e-9 {
                    return Err(Error::Verify(format!(
                        "resource {} overloaded at t = {t}: {used} > {cap}",
                        r + 1
                    )));
                }
            }
        }
        let makespan = start[net.end_job()];
        if (schedule.makespan - makespan).abs() > 1e-6 {
            return Err(Error::Verify(format!(
                "makespan {} differs from end-marker start {makespan}",
                schedule.makespan
            )));
        }
        Ok(())
    }
}

/// Variable map of the time-indexed model: `start[j][t]` is the binary for
/// job `j` starting at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RcpspVars {
    pub start: Vec<Vec<usize>>,
    pub horizon: usize,
}

/// Time-indexed model. Start binaries outside a job's precedence window
/// `[head, T − tail]` are fixed to zero, and each job's start binaries also
/// form an SOS1 set weighted by time so the search can split on start time,
/// end marker first.
pub fn build_rcpsp(inst: &RcpspInstance) -> Result<(Model, RcpspVars)> {
    let net = inst.network()?;
    let steps = net.horizon + 1;
    let (heads, tails) = (net.heads(), net.tails());
    let mut model = Model::new(Sense::Minimize);
    let start = (0..net.num_jobs())
        .map(|j| {
            (0..steps)
                .map(|t| {
                    let open = t >= heads[j] && t + tails[j] <= net.horizon;
                    let upper = if open { 1.0 } else { 0.0 };
                    model.add_variable(format!("x_{j}_{t}"), 0.0, upper, VarKind::Binary)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    // Sets go in reverse topological order: the search splits on the
    // makespan first, then on the jobs closest to the end.
    for j in net.topological_order().into_iter().rev() {
        let row = &start[j];
        let window: Vec<(usize, f64)> = (heads[j]..steps)
            .take_while(|&t| t + tails[j] <= net.horizon)
            .map(|t| (row[t], t as f64))
            .collect();
        if window.len() >= 2 {
            model.add_sos(SosKind::Sos1, window)?;
        }
    }

    let end = net.end_job();
    model.set_objective((0..steps).map(|t| (start[end][t], t as f64)).collect(), 0.0)?;

    for row in &start {
        model.add_linear_constraint(row.iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0)?;
    }
    for (r, &cap) in net.capacities.iter().enumerate() {
        for t in 0..steps {
            let mut terms = Vec::new();
            for j in 0..net.num_jobs() {
                let (p, u) = (net.durations[j], net.usages[j][r]);
                if p == 0 || u == 0.0 {
                    continue;
                }
                // Job j is running at t iff it started in (t − p, t].
                for t2 in (t + 1).saturating_sub(p)..=t {
                    terms.push((start[j][t2], u));
                }
            }
            if !terms.is_empty() {
                model.add_linear_constraint(terms, Relation::Le, cap)?;
            }
        }
    }
    for &(j, s) in &net.arcs {
        let mut terms: Vec<(usize, f64)> = (1..steps).map(|t| (start[s][t], t as f64)).collect();
        terms.extend((1..steps).map(|t| (start[j][t], -(t as f64))));
        model.add_linear_constraint(terms, Relation::Ge, net.durations[j] as f64)?;
    }
    Ok((
        model,
        RcpspVars {
            start,
            horizon: net.horizon,
        },
    ))
}

pub fn decode_rcpsp(solution: &Solution, vars: &RcpspVars, inst: &RcpspInstance) -> Result<Schedule> {
    if !solution.has_incumbent() {
        return Err(Error::NoIncumbent);
    }
    let net = inst.network()?;
    let mut tasks = Vec::with_capacity(net.num_jobs());
    for (j, row) in vars.start.iter().enumerate() {
        let on: Vec<usize> = (0..row.len()).filter(|&t| solution.values[row[t]] > 0.5).collect();
        let [t] = on.as_slice() else {
            return Err(Error::Decode(format!("job {j} has {} start times", on.len())));
        };
        tasks.push(Task {
            job: j,
            machine: None,
            start: *t as f64,
            duration: net.durations[j] as f64,
            dummy: j == 0 || j == net.end_job(),
        });
    }
    let makespan = tasks[net.end_job()].start;
    let schedule = Schedule { tasks, makespan };
    inst.verify(&schedule).map_err(|e| Error::Decode(e.to_string()))?;
    Ok(schedule)
}

pub fn solve_rcpsp(inst: &RcpspInstance, params: &SolveParams) -> Result<(Solution, Option<Schedule>)> {
    let (model, vars) = build_rcpsp(inst)?;
    let solution = solve_mip(&model, params)?;
    let schedule = if solution.has_incumbent() {
        Some(decode_rcpsp(&solution, &vars, inst)?)
    } else {
        None
    };
    Ok((solution, schedule))
}

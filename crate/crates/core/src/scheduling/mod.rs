//! Project (RCPSP) and job-shop scheduling models and their common output.

mod jobshop;
mod rcpsp;

use serde::{Deserialize, Serialize};

pub use jobshop::{build_jobshop, decode_jobshop, solve_jobshop, JobShopInstance, JobShopVars};
pub use rcpsp::{build_rcpsp, decode_rcpsp, solve_rcpsp, RcpspInstance, RcpspVars};

/// One scheduled operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub job: usize,
    /// Machine (job-shop) or `None` for project jobs.
    pub machine: Option<usize>,
    pub start: f64,
    pub duration: f64,
    /// Zero-length start/end markers of a project; not drawn.
    #[serde(default)]
    pub dummy: bool,
}

impl Task {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub tasks: Vec<Task>,
    pub makespan: f64,
}

impl Schedule {
    pub fn new(tasks: Vec<Task>) -> Self {
        let makespan = tasks.iter().map(Task::end).fold(0.0, f64::max);
        Self { tasks, makespan }
    }

    /// Start of the first task belonging to `job`.
    pub fn start_of(&self, job: usize) -> Option<f64> {
        self.tasks.iter().find(|t| t.job == job).map(|t| t.start)
    }

    pub fn visible_tasks(&self) -> impl Iterator<Item = &Task> {
        self.tasks.iter().filter(|t| !t.dummy)
    }
}

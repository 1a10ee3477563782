//! Seeded random instances and solver-versus-oracle suites.
//!
//! Case `i` of a suite with seed `s` is drawn from its own ChaCha stream, so a
//! case is reproducible on its own and independent of how the suite is split
//! across threads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::batch::{self, Mode};
use crate::error::Result;
use crate::facility::{solve_facility, Customer, FacilityInstance, Site};
use crate::knapsack::{solve_knapsack, KnapsackInstance};
use crate::mip::{SolveParams, SolveStatus};
use crate::oracles;
use crate::scheduling::{solve_jobshop, solve_rcpsp, JobShopInstance, RcpspInstance};
use crate::tsp::{solve_tsp, TspInstance};

pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// `n` items, integer profits and weights in `[0, 50]`, capacity in `[0, Σw]`.
pub fn random_knapsack(rng: &mut impl Rng, n: usize) -> KnapsackInstance {
    let profits: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=50) as f64).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=50) as f64).collect();
    let total = weights.iter().sum::<f64>() as u64;
    KnapsackInstance {
        profits,
        weights,
        capacity: rng.gen_range(0..=total) as f64,
    }
}

/// Symmetric matrix with integer distances in `[1, 100]`.
pub fn random_tsp(rng: &mut impl Rng, n: usize) -> TspInstance {
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = rng.gen_range(1..=100) as f64;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let names = (0..n).map(|i| format!("N{i}")).collect();
    TspInstance::from_matrix(names, dist).expect("generated matrix is valid")
}

/// `n` jobs on `m` machines, integer times in `[1, max_time]`, random routes.
pub fn random_jobshop(rng: &mut impl Rng, n: usize, m: usize, max_time: u32) -> JobShopInstance {
    let times = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(1..=max_time) as f64).collect())
        .collect();
    let routes = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (1..=m).collect();
            r.shuffle(rng);
            r
        })
        .collect();
    JobShopInstance::new(times, routes).expect("generated job shop is valid")
}

/// `n` real jobs with durations in `[1, max_duration]`, two resources with
/// capacities in `[2, 6]`, usages never above capacity and forward arcs
/// `i → j` (`i < j`) drawn with probability 0.3.
pub fn random_rcpsp(rng: &mut impl Rng, n: usize, max_duration: u32) -> RcpspInstance {
    let capacities: Vec<f64> = (0..2).map(|_| rng.gen_range(2..=6) as f64).collect();
    let durations = (0..n).map(|_| rng.gen_range(1..=max_duration) as f64).collect();
    let usages = (0..n)
        .map(|_| capacities.iter().map(|&c| rng.gen_range(0..=c as u32) as f64).collect())
        .collect();
    let mut precedence = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(0.3) {
                precedence.push((i, j));
            }
        }
    }
    RcpspInstance {
        durations,
        usages,
        capacities,
        precedence,
        horizon: None,
    }
}

/// Concave curve through `(0, 0)` with `breakpoints` points up to `capacity`.
pub fn random_concave_curve(rng: &mut impl Rng, capacity: f64, breakpoints: usize) -> Vec<(f64, f64)> {
    let mut slope = rng.gen_range(20..=40) as f64;
    let mut curve = vec![(0.0, 0.0)];
    for b in 1..breakpoints {
        let z = capacity * b as f64 / (breakpoints - 1) as f64;
        let (z0, c0) = curve[b - 1];
        curve.push((z, c0 + slope * (z - z0)));
        slope *= rng.gen_range(0.3..0.9);
    }
    curve
}

/// Toy location problem on a 100×100 grid with total capacity covering demand.
pub fn random_facility(rng: &mut impl Rng, sites: usize, customers: usize, breakpoints: usize) -> FacilityInstance {
    let customers: Vec<Customer> = (0..customers)
        .map(|k| Customer {
            id: k as u64 + 1,
            x: rng.gen_range(0..=100) as f64,
            y: rng.gen_range(0..=100) as f64,
            demand: rng.gen_range(0..=30) as f64,
        })
        .collect();
    let demand: f64 = customers.iter().map(|c| c.demand).sum();
    let per_site = (demand / sites.max(1) as f64).ceil() + rng.gen_range(10..=40) as f64;
    let sites = (0..sites)
        .map(|s| Site {
            id: s as u64 + 1,
            x: rng.gen_range(0..=100) as f64,
            y: rng.gen_range(0..=100) as f64,
            capacity: per_site,
            cost_curve: Some(random_concave_curve(rng, per_site, breakpoints)),
        })
        .collect();
    FacilityInstance {
        sites,
        customers,
        cost_curve: None,
        max_open: None,
    }
}

/// One solver-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub case: u64,
    pub solver: Option<f64>,
    pub oracle: Option<f64>,
}

impl CaseOutcome {
    pub fn agrees(&self, tol: f64) -> bool {
        match (self.solver, self.oracle) {
            (Some(a), Some(b)) => (a - b).abs() <= tol * b.abs().max(1.0),
            (None, None) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub problem: &'static str,
    pub outcomes: Vec<CaseOutcome>,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn mismatches(&self) -> Vec<&CaseOutcome> {
        self.outcomes.iter().filter(|o| !o.agrees(self.tolerance)).collect()
    }

    pub fn passed(&self) -> bool {
        self.mismatches().is_empty()
    }
}

fn optimum(status: SolveStatus, objective: Option<f64>) -> Option<f64> {
    (status == SolveStatus::Optimal).then_some(objective).flatten()
}

fn run<I, F>(problem: &'static str, tolerance: f64, instances: Vec<I>, mode: Mode, check: F) -> Result<SuiteReport>
where
    I: Sync,
    F: Fn(&I) -> Result<(Option<f64>, Option<f64>)> + Sync + Send,
{
    let outcomes = batch::map_with(mode, &instances, &check)
        .into_iter()
        .enumerate()
        .map(|(case, r)| {
            r.map(|(solver, oracle)| CaseOutcome {
                case: case as u64,
                solver,
                oracle,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        problem,
        outcomes,
        tolerance,
    })
}

pub fn knapsack_suite(seed: u64, count: u64, mode: Mode) -> Result<SuiteReport> {
    let instances = (0..count)
        .map(|c| {
            let mut rng = case_rng(seed, c);
            let n = rng.gen_range(1..=15);
            random_knapsack(&mut rng, n)
        })
        .collect();
    run("knapsack", 0.0, instances, mode, |inst| {
        let (s, _) = solve_knapsack(inst, &SolveParams::default())?;
        Ok((optimum(s.status, s.objective), Some(oracles::knapsack_dp(inst)?.0)))
    })
}

pub fn tsp_suite(seed: u64, count: u64, mode: Mode) -> Result<SuiteReport> {
    let instances = (0..count)
        .map(|c| {
            let mut rng = case_rng(seed, c);
            let n = rng.gen_range(4..=8);
            random_tsp(&mut rng, n)
        })
        .collect();
    run("tsp", 0.0, instances, mode, |inst| {
        let (s, _) = solve_tsp(inst, &SolveParams::default())?;
        Ok((optimum(s.status, s.objective), Some(oracles::held_karp(&inst.dist)?)))
    })
}

pub fn jobshop_suite(seed: u64, count: u64, mode: Mode) -> Result<SuiteReport> {
    let instances = (0..count)
        .map(|c| {
            let mut rng = case_rng(seed, c);
            let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            random_jobshop(&mut rng, n, m, 4)
        })
        .collect();
    run("jobshop", 0.0, instances, mode, |inst| {
        let (s, _) = solve_jobshop(inst, &SolveParams::default())?;
        Ok((optimum(s.status, s.objective), Some(oracles::enumerate_jobshop(inst)?)))
    })
}

pub fn rcpsp_suite(seed: u64, count: u64, mode: Mode) -> Result<SuiteReport> {
    let instances = (0..count)
        .map(|c| {
            let mut rng = case_rng(seed, c);
            let n = rng.gen_range(1..=5);
            random_rcpsp(&mut rng, n, 4)
        })
        .collect();
    run("rcpsp", 0.0, instances, mode, |inst| {
        let (s, _) = solve_rcpsp(inst, &SolveParams::default())?;
        let solver = match s.status {
            SolveStatus::Infeasible => None,
            _ => Some(optimum(s.status, s.objective).unwrap_or(f64::NAN)),
        };
        Ok((solver, oracles::enumerate_rcpsp(inst)?.map(|v| v as f64)))
    })
}

pub fn facility_suite(seed: u64, count: u64, mode: Mode) -> Result<SuiteReport> {
    let instances = (0..count)
        .map(|c| {
            let mut rng = case_rng(seed, c);
            let (s, k, b) = (rng.gen_range(1..=3), rng.gen_range(1..=4), rng.gen_range(2..=4));
            random_facility(&mut rng, s, k, b)
        })
        .collect();
    run("facility", 1e-6, instances, mode, |inst| {
        let (s, _) = solve_facility(inst, &SolveParams::default())?;
        let solver = match s.status {
            SolveStatus::Infeasible => None,
            _ => Some(optimum(s.status, s.objective).unwrap_or(f64::NAN)),
        };
        Ok((solver, oracles::enumerate_facility(inst)?))
    })
}

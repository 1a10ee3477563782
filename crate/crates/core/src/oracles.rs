//! Brute-force reference solvers, independent of the branch-and-bound path.
//!
//! Each oracle is exact on its stated size range and refuses larger inputs
//! with [`Error::OracleLimit`].

use crate::batch;
use crate::error::{Error, Result};
use crate::facility::FacilityInstance;
use crate::knapsack::KnapsackInstance;
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense};
use crate::scheduling::{JobShopInstance, RcpspInstance};

pub const HELD_KARP_MAX: usize = 16;
pub const RCPSP_MAX_JOBS: usize = 10;
pub const JOBSHOP_MAX_JOBS: usize = 4;
pub const JOBSHOP_MAX_MACHINES: usize = 3;
pub const FACILITY_MAX_SITES: usize = 3;
pub const FACILITY_MAX_CUSTOMERS: usize = 5;
pub const FACILITY_MAX_BREAKPOINTS: usize = 5;
const KNAPSACK_MAX_CAPACITY: f64 = 1e7;

fn limit(msg: impl Into<String>) -> Error {
    Error::OracleLimit(msg.into())
}

/// Exact 0/1 knapsack by dynamic programming over integer capacity.
///
/// Returns the optimum and one optimal subset (0-based, ascending). Among
/// optimal subsets the reconstruction skips an item whenever skipping stays
/// optimal, scanning items in index order.
pub fn knapsack_dp(inst: &KnapsackInstance) -> Result<(f64, Vec<usize>)> {
    inst.validate()?;
    if inst.weights.iter().any(|w| w.fract() != 0.0) {
        return Err(limit("knapsack_dp needs integer weights"));
    }
    if inst.capacity > KNAPSACK_MAX_CAPACITY {
        return Err(limit(format!("capacity above {KNAPSACK_MAX_CAPACITY}")));
    }
    let cap = inst.capacity.floor() as usize;
    let n = inst.len();
    // best[i][c]: optimum over items i.. with capacity c.
    let mut best = vec![vec![0.0f64; cap + 1]; n + 1];
    for i in (0..n).rev() {
        let w = inst.weights[i] as usize;
        for c in 0..=cap {
            let skip = best[i + 1][c];
            best[i][c] = if w <= c {
                skip.max(inst.profits[i] + best[i + 1][c - w])
            } else {
                skip
            };
        }
    }
    let mut chosen = Vec::new();
    let mut c = cap;
    for i in 0..n {
        if best[i][c] != best[i + 1][c] {
            chosen.push(i);
            c -= inst.weights[i] as usize;
        }
    }
    Ok((best[0][cap], chosen))
}

/// Knapsack LP relaxation by ratio-greedy filling with one fractional item.
pub fn fractional_greedy_knapsack_lp(inst: &KnapsackInstance) -> f64 {
    let mut items: Vec<usize> = (0..inst.len()).filter(|&i| inst.profits[i] > 0.0).collect();
    let ratio = |i: usize| {
        if inst.weights[i] == 0.0 {
            f64::INFINITY
        } else {
            inst.profits[i] / inst.weights[i]
        }
    };
    items.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)).then(a.cmp(&b)));
    let mut room = inst.capacity;
    let mut value = 0.0;
    for i in items {
        let w = inst.weights[i];
        if w <= room {
            room -= w;
            value += inst.profits[i];
        } else {
            value += inst.profits[i] * room / w;
            break;
        }
    }
    value
}

/// Shortest Hamiltonian cycle length by the Held–Karp subset recursion.
pub fn held_karp(dist: &[Vec<f64>]) -> Result<f64> {
    let n = dist.len();
    if n > HELD_KARP_MAX {
        return Err(limit(format!("held_karp handles at most {HELD_KARP_MAX} nodes, got {n}")));
    }
    if dist.iter().any(|row| row.len() != n) {
        return Err(crate::error::invalid("distance matrix must be square"));
    }
    match n {
        0 | 1 => return Ok(0.0),
        2 => return Ok(dist[0][1] + dist[1][0]),
        _ => {}
    }
    // Subsets of nodes 1..n as bitmasks over bit (j - 1).
    let m = n - 1;
    let full = 1usize << m;
    let mut cost = vec![f64::INFINITY; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = dist[0][j + 1];
    }
    for mask in 1..full {
        for j in 0..m {
            let here = cost[mask * m + j];
            if mask & (1 << j) == 0 || here.is_infinite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = here + dist[j + 1][k + 1];
                if cand < cost[next * m + k] {
                    cost[next * m + k] = cand;
                }
            }
        }
    }
    Ok((0..m)
        .map(|j| cost[(full - 1) * m + j] + dist[j + 1][0])
        .fold(f64::INFINITY, f64::min))
}

/// Exact optimal makespan of an RCPSP, or `None` when no schedule fits the
/// horizon.
///
/// Depth-first search over precedence-feasible job lists, each job placed at
/// its earliest precedence- and resource-feasible start (the serial
/// generation scheme). Every active schedule arises this way, and some
/// active schedule is optimal. Branches are cut when a job's start plus its
/// longest path to the end marker cannot beat the incumbent; since placing
/// more jobs never moves a job's earliest start forward, such a job closes
/// the whole branch.
pub fn enumerate_rcpsp(inst: &RcpspInstance) -> Result<Option<usize>> {
    if inst.num_real_jobs() > RCPSP_MAX_JOBS {
        return Err(limit(format!(
            "enumerate_rcpsp handles at most {RCPSP_MAX_JOBS} jobs, got {}",
            inst.num_real_jobs()
        )));
    }
    let net = inst.network()?;
    let n = net.num_jobs();
    let mut preds = vec![Vec::new(); n];
    for &(a, b) in &net.arcs {
        preds[b].push(a);
    }
    let mut search = RcpspSearch {
        durations: &net.durations,
        usages: &net.usages,
        capacities: &net.capacities,
        preds,
        tails: net.tails(),
        load: vec![vec![0.0; net.capacities.len()]; net.horizon + 1],
        start: vec![None; n],
        end_job: net.end_job(),
        best: net.horizon + 1,
    };
    search.dfs(0);
    Ok((search.best <= net.horizon).then_some(search.best))
}

struct RcpspSearch<'a> {
    durations: &'a [usize],
    usages: &'a [Vec<f64>],
    capacities: &'a [f64],
    preds: Vec<Vec<usize>>,
    tails: Vec<usize>,
    /// Resource use per time step `[t][r]`.
    load: Vec<Vec<f64>>,
    start: Vec<Option<usize>>,
    end_job: usize,
    best: usize,
}

impl RcpspSearch<'_> {
    fn fits(&self, j: usize, s: usize) -> bool {
        (s..s + self.durations[j]).all(|t| {
            t < self.load.len()
                && self.load[t]
                    .iter()
                    .zip(&self.usages[j])
                    .zip(self.capacities)
                    .all(|((used, u), c)| used + u <= c + 1e-9)
        })
    }

    fn place(&mut self, j: usize, s: usize, sign: f64) {
        for t in s..s + self.durations[j] {
            for (used, u) in self.load[t].iter_mut().zip(&self.usages[j]) {
                *used += sign * u;
            }
        }
    }

    fn dfs(&mut self, placed: usize) {
        if placed == self.start.len() {
            self.best = self.start[self.end_job].expect("end marker placed");
            return;
        }
        for j in 0..self.start.len() {
            if self.start[j].is_some() || self.preds[j].iter().any(|&p| self.start[p].is_none()) {
                continue;
            }
            let earliest = self.preds[j]
                .iter()
                .map(|&p| self.start[p].unwrap() + self.durations[p])
                .max()
                .unwrap_or(0);
            // Placing more jobs only delays j, so a hopeless j ends the branch.
            let Some(s) = (earliest..self.best).find(|&s| self.fits(j, s)) else {
                return;
            };
            if s + self.tails[j] >= self.best {
                return;
            }
            self.start[j] = Some(s);
            self.place(j, s, 1.0);
            self.dfs(placed + 1);
            self.place(j, s, -1.0);
            self.start[j] = None;
        }
    }
}

/// Exact job-shop makespan by enumerating one job permutation per machine and
/// evaluating the longest path through the resulting precedence graph.
pub fn enumerate_jobshop(inst: &JobShopInstance) -> Result<f64> {
    inst.validate()?;
    let (n, m) = (inst.num_jobs(), inst.num_machines());
    if n > JOBSHOP_MAX_JOBS || m > JOBSHOP_MAX_MACHINES {
        return Err(limit(format!(
            "enumerate_jobshop handles at most {JOBSHOP_MAX_JOBS}×{JOBSHOP_MAX_MACHINES}, got {n}×{m}"
        )));
    }
    let perms = permutations(n);
    let mut choice = vec![0usize; m];
    let mut best = f64::INFINITY;
    loop {
        let sequences: Vec<&[usize]> = choice.iter().map(|&c| perms[c].as_slice()).collect();
        if let Some(makespan) = longest_path(inst, &sequences) {
            best = best.min(makespan);
        }
        // Odometer over the per-machine permutation choices.
        let mut k = 0;
        while k < m {
            choice[k] += 1;
            if choice[k] < perms.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
    }
    Ok(if best.is_finite() { best } else { 0.0 })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Makespan of the semi-active schedule for fixed machine sequences, or
/// `None` if the sequences contradict the routes.
fn longest_path(inst: &JobShopInstance, sequences: &[&[usize]]) -> Option<f64> {
    let m = inst.num_machines();
    let node = |job: usize, machine: usize| job * m + machine;
    let count = inst.num_jobs() * m;
    let mut succ = vec![Vec::new(); count];
    let mut indeg = vec![0usize; count];
    let mut arc = |a: usize, b: usize| {
        succ[a].push(b);
        indeg[b] += 1;
    };
    for (j, route) in inst.routes.iter().enumerate() {
        for w in route.windows(2) {
            arc(node(j, w[0]), node(j, w[1]));
        }
    }
    for (k, seq) in sequences.iter().enumerate() {
        for w in seq.windows(2) {
            arc(node(w[0], k), node(w[1], k));
        }
    }
    let mut start = vec![0.0f64; count];
    let mut ready: Vec<usize> = (0..count).filter(|&v| indeg[v] == 0).collect();
    let mut done = 0;
    let mut makespan = 0.0f64;
    while let Some(v) = ready.pop() {
        done += 1;
        let finish = start[v] + inst.times[v / m][v % m];
        makespan = makespan.max(finish);
        for &w in &succ[v] {
            start[w] = start[w].max(finish);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    (done == count).then_some(makespan)
}

/// Exact facility-location optimum, or `None` when infeasible.
///
/// Enumerates every set of usable sites within `max_open` and, per usable
/// site, every adjacent breakpoint pair; each combination leaves a transport
/// LP solved with the simplex. Combinations are evaluated in parallel.
pub fn enumerate_facility(inst: &FacilityInstance) -> Result<Option<f64>> {
    inst.validate()?;
    let (ns, nc) = (inst.sites.len(), inst.customers.len());
    if ns > FACILITY_MAX_SITES
        || nc > FACILITY_MAX_CUSTOMERS
        || (0..ns).any(|s| inst.curve(s).len() > FACILITY_MAX_BREAKPOINTS)
    {
        return Err(limit(format!(
            "enumerate_facility handles at most {FACILITY_MAX_SITES} sites, {FACILITY_MAX_CUSTOMERS} customers \
             and {FACILITY_MAX_BREAKPOINTS} breakpoints"
        )));
    }
    let max_open = inst.max_open.unwrap_or(ns);
    let mut combos: Vec<Vec<Option<usize>>> = vec![Vec::new()];
    for s in 0..ns {
        let segments = inst.curve(s).len() - 1;
        combos = combos
            .into_iter()
            .flat_map(|c| {
                std::iter::once(None).chain((0..segments).map(Some)).map(move |seg| {
                    let mut c = c.clone();
                    c.push(seg);
                    c
                })
            })
            .collect();
    }
    combos.retain(|c| c.iter().flatten().count() <= max_open);
    let results = batch::map(&combos, |combo| transport_lp(inst, combo));
    let mut best: Option<f64> = None;
    for r in results {
        if let Some(v) = r? {
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    Ok(best)
}

/// `segment[s]`: the breakpoint pair site `s` may use, `None` if closed.
fn transport_lp(inst: &FacilityInstance, segment: &[Option<usize>]) -> Result<Option<f64>> {
    let nc = inst.customers.len();
    let open: Vec<(usize, usize)> = segment
        .iter()
        .enumerate()
        .filter_map(|(s, seg)| seg.map(|b| (s, b)))
        .collect();
    // Per open site: nc shipments then two breakpoint weights.
    let stride = nc + 2;
    let mut lp = LpProblem::new(open.len() * stride, Sense::Minimize);
    for (i, &(s, b)) in open.iter().enumerate() {
        let base = i * stride;
        let curve = inst.curve(s);
        let (lo, hi) = (curve[b], curve[b + 1]);
        for k in 0..nc {
            lp.objective[base + k] = inst.distance(s, k);
        }
        lp.objective[base + nc] = lo.1;
        lp.objective[base + nc + 1] = hi.1;
        lp.var_bounds[base + nc] = (0.0, 1.0);
        lp.var_bounds[base + nc + 1] = (0.0, 1.0);
        lp.add_row(vec![(base + nc, 1.0), (base + nc + 1, 1.0)], Relation::Eq, 1.0);
        let mut out: Vec<(usize, f64)> = (0..nc).map(|k| (base + k, 1.0)).collect();
        out.push((base + nc, -lo.0));
        out.push((base + nc + 1, -hi.0));
        lp.add_row(out, Relation::Le, 0.0);
        lp.add_row(
            vec![(base + nc, lo.0), (base + nc + 1, hi.0)],
            Relation::Le,
            inst.max_capacity(s),
        );
    }
    for (k, cust) in inst.customers.iter().enumerate() {
        let inflow = (0..open.len()).map(|i| (i * stride + k, 1.0)).collect();
        lp.add_row(inflow, Relation::Eq, cust.demand);
    }
    let outcome = solve_lp(&lp)?;
    Ok(match outcome.status {
        LpStatus::Optimal => outcome.objective,
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facility::{Customer, Site};

    fn sample_knapsack() -> KnapsackInstance {
        KnapsackInstance {
            profits: vec![10.0, 13.0, 18.0, 31.0, 7.0, 15.0],
            weights: vec![11.0, 15.0, 20.0, 35.0, 10.0, 33.0],
            capacity: 47.0,
        }
    }

    #[test]
    fn knapsack_dp_sample() {
        assert_eq!(knapsack_dp(&sample_knapsack()).unwrap(), (41.0, vec![0, 3]));
    }

    #[test]
    fn knapsack_dp_edges() {
        let mut inst = sample_knapsack();
        inst.capacity = 5.0;
        assert_eq!(knapsack_dp(&inst).unwrap(), (0.0, vec![]));
        inst.capacity = inst.weights.iter().sum();
        assert_eq!(knapsack_dp(&inst).unwrap(), (94.0, (0..6).collect()));
        inst.weights[0] = 1.5;
        assert!(matches!(knapsack_dp(&inst), Err(Error::OracleLimit(_))));
    }

    #[test]
    fn greedy_lp() {
        let mut inst = sample_knapsack();
        let v = fractional_greedy_knapsack_lp(&inst);
        assert!((v - (10.0 + 18.0 + 31.0 * 16.0 / 35.0)).abs() < 1e-12);
        inst.capacity = 0.0;
        assert_eq!(fractional_greedy_knapsack_lp(&inst), 0.0);
        inst.capacity = 1000.0;
        assert_eq!(fractional_greedy_knapsack_lp(&inst), 94.0);
    }

    #[test]
    fn held_karp_small() {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 4.0], vec![2.0, 4.0, 0.0]];
        assert_eq!(held_karp(&d).unwrap(), 7.0);
        assert_eq!(held_karp(&[vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap(), 10.0);
        assert!(held_karp(&vec![vec![0.0; 17]; 17]).is_err());
    }

    #[test]
    fn rcpsp_chain_and_infeasible() {
        let chain = RcpspInstance {
            durations: vec![3.0, 2.0],
            usages: vec![vec![1.0], vec![1.0]],
            capacities: vec![1.0],
            precedence: vec![(1, 2)],
            horizon: None,
        };
        assert_eq!(enumerate_rcpsp(&chain).unwrap(), Some(5));
        let mut over = chain.clone();
        over.usages[0][0] = 2.0;
        assert_eq!(enumerate_rcpsp(&over).unwrap(), None);
        let mut parallel = chain;
        parallel.precedence.clear();
        parallel.capacities[0] = 2.0;
        assert_eq!(enumerate_rcpsp(&parallel).unwrap(), Some(3));
    }

    #[test]
    fn jobshop_sample_is_seven() {
        let inst = JobShopInstance::new(
            vec![vec![2.0, 1.0, 2.0], vec![1.0, 2.0, 2.0], vec![1.0, 2.0, 1.0]],
            vec![vec![3, 1, 2], vec![2, 3, 1], vec![3, 2, 1]],
        )
        .unwrap();
        assert_eq!(enumerate_jobshop(&inst).unwrap(), 7.0);
        let single = JobShopInstance::new(vec![vec![2.0, 3.0, 4.0]], vec![vec![2, 3, 1]]).unwrap();
        assert_eq!(enumerate_jobshop(&single).unwrap(), 9.0);
    }

    #[test]
    fn facility_single_site() {
        let mut inst = FacilityInstance {
            sites: vec![Site {
                id: 1,
                x: 0.0,
                y: 0.0,
                capacity: 100.0,
                cost_curve: None,
            }],
            customers: vec![Customer {
                id: 1,
                x: 3.0,
                y: 4.0,
                demand: 10.0,
            }],
            cost_curve: Some(vec![(0.0, 0.0), (100.0, 0.0)]),
            max_open: None,
        };
        assert!((enumerate_facility(&inst).unwrap().unwrap() - 50.0).abs() < 1e-9);
        inst.customers[0].demand = 0.0;
        assert_eq!(enumerate_facility(&inst).unwrap(), Some(0.0));
        inst.customers[0].demand = 200.0;
        assert_eq!(enumerate_facility(&inst).unwrap(), None);
    }
}

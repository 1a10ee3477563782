//! Solves the five bundled instances and prints one line per problem.
//!
//! Run from the workspace root: `cargo run --release --example bundled_instances`.

use std::time::Instant;

use cellplan_core::facility::{solve_facility, FacilityInstance};
use cellplan_core::knapsack::{solve_knapsack, KnapsackInstance};
use cellplan_core::scheduling::{solve_jobshop, solve_rcpsp, JobShopInstance, RcpspInstance};
use cellplan_core::tsp::{solve_tsp, TspInstance};
use cellplan_core::{Result, SolveParams};

fn read(name: &str) -> String {
    let path = format!("instances/{name}");
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn main() -> Result<()> {
    let params = SolveParams::default();

    let t = Instant::now();
    let (_, plan) = solve_knapsack(&KnapsackInstance::from_json(&read("knapsack.json"))?, &params)?;
    let plan = plan.expect("knapsack is feasible");
    println!("knapsack  items {:?} profit {} ({:.2?})", plan.labels(), plan.profit, t.elapsed());

    let t = Instant::now();
    let inst = TspInstance::from_json(&read("tsp.json"))?;
    let (_, tour) = solve_tsp(&inst, &params)?;
    let tour = tour.expect("tour exists");
    let route: Vec<&str> = tour.order.iter().map(|&i| inst.names[i].as_str()).collect();
    println!("tsp       length {} via {} ({:.2?})", tour.length, route.join(" -> "), t.elapsed());

    let t = Instant::now();
    let (_, schedule) = solve_rcpsp(&RcpspInstance::from_json(&read("rcpsp.json"))?, &params)?;
    println!("rcpsp     makespan {} ({:.2?})", schedule.expect("schedule exists").makespan, t.elapsed());

    let t = Instant::now();
    let (_, schedule) = solve_jobshop(&JobShopInstance::from_json(&read("jobshop.json"))?, &params)?;
    println!("jobshop   makespan {} ({:.2?})", schedule.expect("schedule exists").makespan, t.elapsed());

    let t = Instant::now();
    let (_, plan) = solve_facility(&FacilityInstance::from_json(&read("facility.json"))?, &params)?;
    let plan = plan.expect("plan exists");
    println!(
        "facility  open sites {:?} total cost {:.2} ({:.2?})",
        plan.open_sites,
        plan.total_cost,
        t.elapsed()
    );
    Ok(())
}

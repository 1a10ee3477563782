//! `cellplan` command-line driver: reads an instance, solves or cross-checks
//! it, prints the plan and optionally writes a JSON report and an SVG chart.
//!
//! Exit codes: 0 optimal, 2 infeasible, 3 unbounded, 4 time or node limit
//! reached, 1 usage, parse or I/O error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cellplan_core::facility::{solve_facility, FacilityInstance, FacilityPlan};
use cellplan_core::knapsack::{solve_knapsack, KnapsackInstance, KnapsackPlan};
use cellplan_core::scheduling::{solve_jobshop, solve_rcpsp, JobShopInstance, RcpspInstance, Schedule};
use cellplan_core::tsp::{solve_tsp, Tour, TspInstance};
use cellplan_core::{oracles, render, Solution, SolveParams, SolveStatus};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const EXIT_OPTIMAL: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cellplan", version, about = "Production-planning models on a branch-and-bound MILP solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance with the MILP model.
    Solve {
        problem: Problem,
        instance: PathBuf,
        /// Wall-clock limit in seconds.
        #[arg(long, value_name = "SECONDS")]
        time_limit: Option<f64>,
        /// Relative optimality gap.
        #[arg(long, value_name = "REL")]
        gap: Option<f64>,
        /// Write the run report as JSON.
        #[arg(long, value_name = "FILE.json")]
        output: Option<PathBuf>,
        /// Write a chart of the plan.
        #[arg(long, value_name = "FILE.svg")]
        svg: Option<PathBuf>,
    },
    /// Solve an instance with the brute-force reference solver.
    Oracle { problem: Problem, instance: PathBuf },
    /// Re-validate the plan in a JSON report against its instance.
    Check {
        problem: Problem,
        instance: PathBuf,
        report: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Knapsack,
    Tsp,
    Rcpsp,
    Jobshop,
    Facility,
}

/// Machine-readable outcome of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: Problem,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: usize,
    pub lp_iterations: usize,
    /// Seconds spent building, solving and decoding.
    pub wall_time: f64,
    pub plan: Option<serde_json::Value>,
}

pub fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal => EXIT_OPTIMAL,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::Unbounded => EXIT_UNBOUNDED,
        SolveStatus::Feasible | SolveStatus::NoSolution => EXIT_LIMIT,
    }
}

/// Runs the CLI with stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OPTIMAL };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve {
            problem,
            instance,
            time_limit,
            gap,
            output,
            svg,
        } => solve(problem, &instance, time_limit, gap, output.as_deref(), svg.as_deref(), out),
        Command::Oracle { problem, instance } => oracle(problem, &instance, out),
        Command::Check {
            problem,
            instance,
            report,
        } => check(problem, &instance, &report, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

type CliResult<T> = Result<T, String>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn parse<T>(path: &Path, f: impl FnOnce(&str) -> cellplan_core::Result<T>) -> CliResult<T> {
    f(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

enum Instance {
    Knapsack(KnapsackInstance),
    Tsp(TspInstance),
    Rcpsp(RcpspInstance),
    Jobshop(JobShopInstance),
    Facility(FacilityInstance),
}

fn load(problem: Problem, path: &Path) -> CliResult<Instance> {
    Ok(match problem {
        Problem::Knapsack => Instance::Knapsack(parse(path, KnapsackInstance::from_json)?),
        Problem::Tsp => Instance::Tsp(parse(path, TspInstance::from_json)?),
        Problem::Rcpsp => Instance::Rcpsp(parse(path, RcpspInstance::from_json)?),
        Problem::Jobshop => Instance::Jobshop(parse(path, JobShopInstance::from_json)?),
        Problem::Facility => Instance::Facility(parse(path, FacilityInstance::from_json)?),
    })
}

/// A decoded plan with its human-readable summary and chart.
struct Rendered {
    plan: serde_json::Value,
    summary: String,
    svg: String,
}

fn to_value<T: Serialize>(plan: &T) -> serde_json::Value {
    serde_json::to_value(plan).expect("plans serialize")
}

fn knapsack_output(plan: &KnapsackPlan, inst: &KnapsackInstance) -> Rendered {
    let mut value = to_value(plan);
    value["items"] = to_value(&plan.labels());
    let items: Vec<String> = plan.labels().iter().map(usize::to_string).collect();
    let summary = format!(
        "items: {}\nprofit: {}\nload: {} of {}\n",
        if items.is_empty() { "none".into() } else { items.join(", ") },
        plan.profit,
        plan.load,
        inst.capacity
    );
    // Bars of item durations laid end to end on the machine.
    let mut start = 0.0;
    let tasks = plan
        .chosen
        .iter()
        .map(|&i| {
            let t = cellplan_core::scheduling::Task {
                job: i,
                machine: Some(0),
                start,
                duration: inst.weights[i],
                dummy: false,
            };
            start += inst.weights[i];
            t
        })
        .collect();
    let meta = render::GanttMeta {
        title: "Machine time".into(),
        lanes: render::Lanes::Machines(1),
        resources: Vec::new(),
    };
    Rendered {
        plan: value,
        summary,
        svg: render::render_gantt(&Schedule::new(tasks), &meta),
    }
}

fn tour_output(tour: &Tour, inst: &TspInstance) -> Rendered {
    let route: Vec<&str> = tour.order.iter().map(|&i| inst.names[i].as_str()).collect();
    let mut value = to_value(tour);
    value["route"] = to_value(&route);
    Rendered {
        plan: value,
        summary: format!("tour: {}\nlength: {}\n", route.join(" -> "), tour.length),
        svg: render::render_tour(tour, inst, None),
    }
}

fn schedule_summary(schedule: &Schedule, name: impl Fn(&cellplan_core::scheduling::Task) -> String) -> String {
    let mut s = format!("makespan: {}\n", schedule.makespan);
    for t in schedule.visible_tasks() {
        let _ = writeln!(s, "{}: start {}, end {}", name(t), t.start, t.end());
    }
    s
}

fn rcpsp_output(schedule: &Schedule, inst: &RcpspInstance) -> Rendered {
    Rendered {
        plan: to_value(schedule),
        summary: schedule_summary(schedule, |t| format!("job {}", t.job)),
        svg: render::render_rcpsp(schedule, inst),
    }
}

fn jobshop_output(schedule: &Schedule, inst: &JobShopInstance) -> Rendered {
    Rendered {
        plan: to_value(schedule),
        summary: schedule_summary(schedule, |t| {
            format!("job {} on machine {}", t.job + 1, t.machine.map_or(0, |m| m + 1))
        }),
        svg: render::render_jobshop(schedule, inst),
    }
}

fn facility_output(plan: &FacilityPlan, inst: &FacilityInstance) -> Rendered {
    let mut s = String::new();
    let open: Vec<String> = plan.open_sites.iter().map(u64::to_string).collect();
    let _ = writeln!(s, "open sites: {}", if open.is_empty() { "none".into() } else { open.join(", ") });
    for id in &plan.open_sites {
        let _ = writeln!(s, "site {id}: capacity {:.3}", plan.installed_capacity[id]);
    }
    for sh in &plan.shipments {
        let _ = writeln!(s, "ship {:.3} from site {} to customer {}", sh.units, sh.site, sh.customer);
    }
    let _ = writeln!(
        s,
        "transport cost: {:.3}\nbuild cost: {:.3}\ntotal cost: {:.3}",
        plan.transport_cost, plan.build_cost, plan.total_cost
    );
    Rendered {
        plan: to_value(plan),
        summary: s,
        svg: render::render_facility(plan, inst),
    }
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Feasible => "feasible (limit reached)",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::NoSolution => "no solution (limit reached)",
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    })
}

fn fmt_gap(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{:.4}%", 100.0 * v))
}

fn solve(
    problem: Problem,
    path: &Path,
    time_limit: Option<f64>,
    gap: Option<f64>,
    output: Option<&Path>,
    svg: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let inst = load(problem, path)?;
    let mut params = SolveParams {
        time_limit,
        ..SolveParams::default()
    };
    if let Some(g) = gap {
        params.rel_gap = g;
    }
    params.validate().map_err(|e| e.to_string())?;

    let clock = Instant::now();
    let (solution, rendered): (Solution, Option<Rendered>) = match &inst {
        Instance::Knapsack(i) => {
            let (s, p) = solve_knapsack(i, &params).map_err(|e| e.to_string())?;
            if let Some(p) = &p {
                p.verify(i).map_err(|e| e.to_string())?;
            }
            (s, p.map(|p| knapsack_output(&p, i)))
        }
        Instance::Tsp(i) => {
            let (s, t) = solve_tsp(i, &params).map_err(|e| e.to_string())?;
            if let Some(t) = &t {
                t.verify(i).map_err(|e| e.to_string())?;
            }
            (s, t.map(|t| tour_output(&t, i)))
        }
        Instance::Rcpsp(i) => {
            let (s, p) = solve_rcpsp(i, &params).map_err(|e| e.to_string())?;
            if let Some(p) = &p {
                i.verify(p).map_err(|e| e.to_string())?;
            }
            (s, p.map(|p| rcpsp_output(&p, i)))
        }
        Instance::Jobshop(i) => {
            let (s, p) = solve_jobshop(i, &params).map_err(|e| e.to_string())?;
            if let Some(p) = &p {
                i.verify(p).map_err(|e| e.to_string())?;
            }
            (s, p.map(|p| jobshop_output(&p, i)))
        }
        Instance::Facility(i) => {
            let (s, p) = solve_facility(i, &params).map_err(|e| e.to_string())?;
            if let Some(p) = &p {
                p.verify(i).map_err(|e| e.to_string())?;
            }
            (s, p.map(|p| facility_output(&p, i)))
        }
    };
    let wall_time = clock.elapsed().as_secs_f64();

    let report = RunReport {
        problem,
        status: solution.status,
        objective: solution.objective,
        bound: solution.bound,
        gap: solution.gap(),
        nodes: solution.nodes,
        lp_iterations: solution.lp_iterations,
        wall_time,
        plan: rendered.as_ref().map(|r| r.plan.clone()),
    };
    let mut text = format!(
        "status: {}\nobjective: {}\nbound: {}\ngap: {}\nnodes: {}\nwall time: {:.3} s\n",
        status_name(report.status),
        fmt_opt(report.objective),
        fmt_opt(report.bound),
        fmt_gap(report.gap),
        report.nodes,
        report.wall_time
    );
    if let Some(r) = &rendered {
        text.push_str(&r.summary);
    }
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    if let Some(path) = output {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &(json + "\n"))?;
    }
    if let Some(path) = svg {
        match &rendered {
            Some(r) => write_file(path, &r.svg)?,
            None => return Err(format!("no plan to draw; {} not written", path.display())),
        }
    }
    Ok(exit_code(report.status))
}

fn oracle(problem: Problem, path: &Path, out: &mut dyn Write) -> CliResult<i32> {
    let inst = load(problem, path)?;
    let err = |e: cellplan_core::Error| e.to_string();
    let (text, code) = match &inst {
        Instance::Knapsack(i) => {
            let (best, items) = oracles::knapsack_dp(i).map_err(err)?;
            let labels: Vec<String> = items.iter().map(|i| (i + 1).to_string()).collect();
            (format!("optimum: {best}\nitems: {}\n", labels.join(", ")), EXIT_OPTIMAL)
        }
        Instance::Tsp(i) => (format!("optimum: {}\n", oracles::held_karp(&i.dist).map_err(err)?), EXIT_OPTIMAL),
        Instance::Jobshop(i) => (
            format!("optimum: {}\n", oracles::enumerate_jobshop(i).map_err(err)?),
            EXIT_OPTIMAL,
        ),
        Instance::Rcpsp(i) => match oracles::enumerate_rcpsp(i).map_err(err)? {
            Some(v) => (format!("optimum: {v}\n"), EXIT_OPTIMAL),
            None => ("infeasible\n".to_string(), EXIT_INFEASIBLE),
        },
        Instance::Facility(i) => match oracles::enumerate_facility(i).map_err(err)? {
            Some(v) => (format!("optimum: {v}\n"), EXIT_OPTIMAL),
            None => ("infeasible\n".to_string(), EXIT_INFEASIBLE),
        },
    };
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok(code)
}

/// Replays the plan of a saved report against the instance.
pub fn check_report(problem: Problem, inst_text: &str, report: &RunReport) -> CliResult<()> {
    if report.problem != problem {
        return Err(format!("report is for {:?}, not {problem:?}", report.problem));
    }
    let Some(plan) = report.plan.clone() else {
        return Err("report carries no plan".into());
    };
    let bad = |e: serde_json::Error| format!("malformed plan: {e}");
    let e = |e: cellplan_core::Error| e.to_string();
    let objective = match problem {
        Problem::Knapsack => {
            let inst = KnapsackInstance::from_json(inst_text).map_err(e)?;
            let p: KnapsackPlan = serde_json::from_value(plan).map_err(bad)?;
            p.verify(&inst).map_err(e)?;
            p.profit
        }
        Problem::Tsp => {
            let inst = TspInstance::from_json(inst_text).map_err(e)?;
            let t: Tour = serde_json::from_value(plan).map_err(bad)?;
            t.verify(&inst).map_err(e)?;
            t.length
        }
        Problem::Rcpsp => {
            let inst = RcpspInstance::from_json(inst_text).map_err(e)?;
            let s: Schedule = serde_json::from_value(plan).map_err(bad)?;
            inst.verify(&s).map_err(e)?;
            s.makespan
        }
        Problem::Jobshop => {
            let inst = JobShopInstance::from_json(inst_text).map_err(e)?;
            let s: Schedule = serde_json::from_value(plan).map_err(bad)?;
            inst.verify(&s).map_err(e)?;
            s.makespan
        }
        Problem::Facility => {
            let inst = FacilityInstance::from_json(inst_text).map_err(e)?;
            let p: FacilityPlan = serde_json::from_value(plan).map_err(bad)?;
            p.verify(&inst).map_err(e)?;
            p.total_cost
        }
    };
    match report.objective {
        Some(o) if (o - objective).abs() <= 1e-6 * o.abs().max(1.0) => Ok(()),
        o => Err(format!("plan value {objective} disagrees with reported objective {}", fmt_opt(o))),
    }
}

fn check(problem: Problem, inst_path: &Path, report_path: &Path, out: &mut dyn Write) -> CliResult<i32> {
    let inst_text = read(inst_path)?;
    let report: RunReport = serde_json::from_str(&read(report_path)?)
        .map_err(|e| format!("{}: {e}", report_path.display()))?;
    check_report(problem, &inst_text, &report)?;
    writeln!(out, "plan is valid").map_err(|e| e.to_string())?;
    Ok(EXIT_OPTIMAL)
}

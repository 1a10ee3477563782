//! SVG charts: Gantt diagrams for schedules, maps for tours and plant plans.
//!
//! Task bars carry `class="task"`, location glyphs `class="node"` (plus
//! `site`/`customer` for plant plans) and connections `class="edge"`, so the
//! output can be inspected structurally.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::facility::{FacilityInstance, FacilityPlan};
use crate::scheduling::{JobShopInstance, RcpspInstance, Schedule};
use crate::tsp::{Tour, TspInstance};

const UNIT: f64 = 40.0;
const LANE: f64 = 28.0;
const MARGIN: f64 = 60.0;
const STRIP: f64 = 70.0;
const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn num(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect class=\"background\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{body}</svg>\n",
        w = num(width),
        h = num(height)
    )
}

/// How tasks map to Gantt lanes.
#[derive(Debug, Clone, PartialEq)]
pub enum Lanes {
    /// One lane per machine; bars are labelled with their job.
    Machines(usize),
    /// One lane per job.
    Jobs(usize),
}

/// Per-step usage of one renewable resource.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceStrip {
    pub name: String,
    pub capacity: f64,
    /// Usage per job id.
    pub usage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GanttMeta {
    pub title: String,
    pub lanes: Lanes,
    pub resources: Vec<ResourceStrip>,
}

impl GanttMeta {
    pub fn jobshop(inst: &JobShopInstance) -> Self {
        Self {
            title: "Job shop".into(),
            lanes: Lanes::Machines(inst.num_machines()),
            resources: Vec::new(),
        }
    }

    /// Lanes for real jobs `1..=n` plus one usage strip per resource.
    pub fn rcpsp(inst: &RcpspInstance) -> Self {
        let n = inst.num_real_jobs();
        let resources = inst
            .capacities
            .iter()
            .enumerate()
            .map(|(r, &capacity)| {
                let mut usage = vec![0.0; n + 2];
                for (j, u) in inst.usages.iter().enumerate() {
                    usage[j + 1] = u[r];
                }
                ResourceStrip {
                    name: format!("R{}", r + 1),
                    capacity,
                    usage,
                }
            })
            .collect();
        Self {
            title: "Project".into(),
            lanes: Lanes::Jobs(n + 2),
            resources,
        }
    }
}

/// Gantt chart: one bar per non-dummy task, time proportional to x.
pub fn render_gantt(schedule: &Schedule, meta: &GanttMeta) -> String {
    let tasks: Vec<_> = schedule.visible_tasks().collect();
    let horizon = schedule.makespan.max(1.0).ceil();
    let (lane_count, lane_label): (usize, Box<dyn Fn(usize) -> String>) = match meta.lanes {
        Lanes::Machines(m) => (m, Box::new(|k| format!("M{}", k + 1))),
        // Lane 0 is job 1; the markers 0 and n + 1 get no lane.
        Lanes::Jobs(n) => (n.saturating_sub(2), Box::new(|k| format!("J{}", k + 1))),
    };
    let lane_of = |t: &crate::scheduling::Task| match meta.lanes {
        Lanes::Machines(_) => t.machine.unwrap_or(0),
        Lanes::Jobs(_) => t.job.saturating_sub(1),
    };
    let x0 = MARGIN;
    let y0 = MARGIN / 2.0 + 16.0;
    let chart_h = lane_count as f64 * LANE;
    let width = x0 + horizon * UNIT + MARGIN / 2.0;
    let strips_h = meta.resources.len() as f64 * (STRIP + 20.0);
    let height = y0 + chart_h + 30.0 + strips_h + 10.0;

    let mut b = String::new();
    let _ = writeln!(b, "<text x=\"{}\" y=\"{}\" font-size=\"14\">{}</text>", num(x0), num(MARGIN / 2.0), escape(&meta.title));
    for k in 0..lane_count {
        let y = y0 + k as f64 * LANE;
        let _ = writeln!(
            b,
            "<text class=\"lane\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            num(x0 - 8.0),
            num(y + LANE * 0.65),
            escape(&lane_label(k))
        );
    }
    // Axes.
    let axis_y = y0 + chart_h;
    let _ = writeln!(
        b,
        "<line class=\"axis\" x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{ay}\" stroke=\"black\"/>\n\
         <line class=\"axis\" x1=\"{x}\" y1=\"{ay}\" x2=\"{x2}\" y2=\"{ay}\" stroke=\"black\"/>",
        x = num(x0),
        y0 = num(y0),
        ay = num(axis_y),
        x2 = num(x0 + horizon * UNIT)
    );
    for t in 0..=horizon as usize {
        let x = x0 + t as f64 * UNIT;
        let _ = writeln!(
            b,
            "<line class=\"tick\" x1=\"{x}\" y1=\"{ay}\" x2=\"{x}\" y2=\"{ay2}\" stroke=\"black\"/>\
             <text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\">{t}</text>",
            x = num(x),
            ay = num(axis_y),
            ay2 = num(axis_y + 4.0),
            ty = num(axis_y + 16.0)
        );
    }
    for task in &tasks {
        let lane = lane_of(task);
        let (x, w) = (x0 + task.start * UNIT, task.duration * UNIT);
        let y = y0 + lane as f64 * LANE + 3.0;
        let label = match meta.lanes {
            Lanes::Machines(_) => format!("J{}", task.job + 1),
            Lanes::Jobs(_) => format!("{}", task.job),
        };
        let _ = writeln!(
            b,
            "<rect class=\"task\" data-job=\"{job}\" data-start=\"{s}\" data-end=\"{e}\" x=\"{x}\" y=\"{y}\" \
             width=\"{w}\" height=\"{h}\" fill=\"{fill}\" stroke=\"black\"/>\
             <text x=\"{tx}\" y=\"{ty}\" text-anchor=\"middle\" fill=\"white\">{label}</text>",
            job = task.job,
            s = num(task.start),
            e = num(task.end()),
            x = num(x),
            y = num(y),
            w = num(w),
            h = num(LANE - 6.0),
            fill = PALETTE[task.job % PALETTE.len()],
            tx = num(x + w / 2.0),
            ty = num(y + LANE * 0.55),
            label = escape(&label)
        );
    }
    // Resource strips: step profile of total usage against capacity.
    let mut top = axis_y + 30.0;
    for res in &meta.resources {
        let steps = horizon as usize;
        let profile: Vec<f64> = (0..steps)
            .map(|t| {
                let t = t as f64;
                tasks
                    .iter()
                    .filter(|k| k.start <= t && t < k.end())
                    .map(|k| res.usage.get(k.job).copied().unwrap_or(0.0))
                    .sum()
            })
            .collect();
        let peak = profile.iter().copied().fold(res.capacity, f64::max).max(1.0);
        let y_of = |v: f64| top + STRIP - v / peak * STRIP;
        let mut points = format!("{},{}", num(x0), num(y_of(0.0)));
        for (t, &v) in profile.iter().enumerate() {
            let (xa, xb) = (x0 + t as f64 * UNIT, x0 + (t + 1) as f64 * UNIT);
            let _ = write!(points, " {},{} {},{}", num(xa), num(y_of(v)), num(xb), num(y_of(v)));
        }
        let _ = write!(points, " {},{}", num(x0 + steps as f64 * UNIT), num(y_of(0.0)));
        let _ = writeln!(
            b,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n\
             <polyline class=\"usage\" points=\"{points}\" fill=\"#dde6f0\" stroke=\"#4e79a7\"/>\n\
             <line class=\"capacity\" x1=\"{}\" y1=\"{cy}\" x2=\"{}\" y2=\"{cy}\" stroke=\"#e15759\" stroke-dasharray=\"4 3\"/>",
            num(x0 - 8.0),
            num(top + STRIP / 2.0),
            escape(&res.name),
            num(x0),
            num(x0 + steps as f64 * UNIT),
            cy = num(y_of(res.capacity))
        );
        top += STRIP + 20.0;
    }
    document(width, height, &b)
}

pub fn render_jobshop(schedule: &Schedule, inst: &JobShopInstance) -> String {
    render_gantt(schedule, &GanttMeta::jobshop(inst))
}

pub fn render_rcpsp(schedule: &Schedule, inst: &RcpspInstance) -> String {
    render_gantt(schedule, &GanttMeta::rcpsp(inst))
}

const MAP: f64 = 480.0;

/// Maps points into a `MAP`-sized square with y pointing up.
fn fit(points: &[(f64, f64)]) -> impl Fn((f64, f64)) -> (f64, f64) {
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        lo_x = lo_x.min(x);
        lo_y = lo_y.min(y);
        hi_x = hi_x.max(x);
        hi_y = hi_y.max(y);
    }
    if points.is_empty() {
        (lo_x, lo_y, hi_x, hi_y) = (0.0, 0.0, 1.0, 1.0);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    let scale = (MAP - 2.0 * MARGIN) / span;
    move |(x, y)| (MARGIN + (x - lo_x) * scale, MAP - MARGIN - (y - lo_y) * scale)
}

/// Equal-angle placement on a circle, node 0 at the top.
pub fn circular_layout(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let a = PI / 2.0 - 2.0 * PI * i as f64 / n.max(1) as f64;
            (a.cos(), a.sin())
        })
        .collect()
}

/// Tour map: one glyph per location, one edge per hop. Without coordinates
/// the locations sit on a circle in index order.
pub fn render_tour(tour: &Tour, inst: &TspInstance, coords: Option<&[(f64, f64)]>) -> String {
    let n = inst.len();
    let raw = match coords {
        Some(c) => c.to_vec(),
        None => circular_layout(n),
    };
    let place = fit(&raw);
    let pos: Vec<(f64, f64)> = raw.iter().map(|&p| place(p)).collect();
    let mut b = String::new();
    let _ = writeln!(
        b,
        "<text x=\"{}\" y=\"24\" font-size=\"14\">Tour length {}</text>",
        num(MARGIN / 2.0),
        num(tour.length)
    );
    for w in tour.order.windows(2) {
        let (a, c) = (pos[w[0]], pos[w[1]]);
        let _ = writeln!(
            b,
            "<line class=\"edge\" data-from=\"{}\" data-to=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#4e79a7\" stroke-width=\"2\"/>",
            w[0],
            w[1],
            num(a.0),
            num(a.1),
            num(c.0),
            num(c.1)
        );
    }
    for (i, &(x, y)) in pos.iter().enumerate() {
        let fill = if i == 0 { "#e15759" } else { "#f28e2b" };
        let _ = writeln!(
            b,
            "<circle class=\"node\" data-index=\"{i}\" cx=\"{}\" cy=\"{}\" r=\"6\" fill=\"{fill}\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{}\">{}</text>",
            num(x),
            num(y),
            num(x + 9.0),
            num(y - 9.0),
            escape(&inst.names[i])
        );
    }
    document(MAP, MAP, &b)
}

/// Plant plan map at the instance coordinates: square site glyphs (filled
/// when open), round customer glyphs, one edge per shipment.
pub fn render_facility(plan: &FacilityPlan, inst: &FacilityInstance) -> String {
    let raw: Vec<(f64, f64)> = inst
        .sites
        .iter()
        .map(|s| (s.x, s.y))
        .chain(inst.customers.iter().map(|c| (c.x, c.y)))
        .collect();
    let place = fit(&raw);
    let site_pos = |id: u64| inst.sites.iter().find(|s| s.id == id).map(|s| place((s.x, s.y)));
    let cust_pos = |id: u64| inst.customers.iter().find(|c| c.id == id).map(|c| place((c.x, c.y)));
    let mut b = String::new();
    let _ = writeln!(
        b,
        "<text x=\"{}\" y=\"24\" font-size=\"14\">Total cost {}</text>",
        num(MARGIN / 2.0),
        num(plan.total_cost)
    );
    for sh in &plan.shipments {
        if let (Some(a), Some(c)) = (site_pos(sh.site), cust_pos(sh.customer)) {
            let _ = writeln!(
                b,
                "<line class=\"edge\" data-site=\"{}\" data-customer=\"{}\" data-units=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                 stroke=\"#4e79a7\" stroke-width=\"{}\"/>",
                sh.site,
                sh.customer,
                num(sh.units),
                num(a.0),
                num(a.1),
                num(c.0),
                num(c.1),
                num(1.0 + 3.0 * sh.units / inst.total_demand().max(1.0))
            );
        }
    }
    for s in &inst.sites {
        let (x, y) = place((s.x, s.y));
        let open = plan.open_sites.contains(&s.id);
        let _ = writeln!(
            b,
            "<rect class=\"node site\" data-id=\"{id}\" data-open=\"{open}\" x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" \
             fill=\"{}\" stroke=\"black\"/><text x=\"{}\" y=\"{}\">F{id}</text>",
            num(x - 6.0),
            num(y - 6.0),
            if open { "#e15759" } else { "white" },
            num(x + 9.0),
            num(y - 9.0),
            id = s.id
        );
    }
    for c in &inst.customers {
        let (x, y) = place((c.x, c.y));
        let _ = writeln!(
            b,
            "<circle class=\"node customer\" data-id=\"{id}\" cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#59a14f\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{}\">C{id}</text>",
            num(x),
            num(y),
            num(x + 8.0),
            num(y + 14.0),
            id = c.id
        );
    }
    document(MAP, MAP, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduling::Task;

    fn task(job: usize, machine: Option<usize>, start: f64, duration: f64) -> Task {
        Task {
            job,
            machine,
            start,
            duration,
            dummy: false,
        }
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
        assert_eq!(escape("СКЛАД"), "СКЛАД");
    }

    #[test]
    fn empty_schedule_has_axes_only() {
        let meta = GanttMeta {
            title: "empty".into(),
            lanes: Lanes::Machines(2),
            resources: Vec::new(),
        };
        let svg = render_gantt(&Schedule::new(Vec::new()), &meta);
        assert_eq!(svg.matches("class=\"task\"").count(), 0);
        assert!(svg.contains("class=\"axis\""));
    }

    #[test]
    fn chain_schedule_bars() {
        let meta = GanttMeta {
            title: "chain".into(),
            lanes: Lanes::Jobs(4),
            resources: Vec::new(),
        };
        let s = Schedule::new(vec![task(1, None, 0.0, 3.0), task(2, None, 3.0, 2.0)]);
        let svg = render_gantt(&s, &meta);
        assert_eq!(svg.matches("class=\"task\"").count(), 2);
        assert!(svg.contains("data-start=\"3\" data-end=\"5\""));
    }

    #[test]
    fn circle_layout_is_even() {
        let p = circular_layout(4);
        assert!((p[0].1 - 1.0).abs() < 1e-12);
        assert!((p[2].1 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn number_format() {
        assert_eq!(num(7.0), "7");
        assert_eq!(num(2.5), "2.5");
        assert_eq!(num(1.0 / 3.0), "0.33");
    }
}

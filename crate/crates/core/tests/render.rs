use std::path::PathBuf;

use cellplan_core::facility::{solve_facility, FacilityInstance};
use cellplan_core::render::{render_facility, render_jobshop, render_rcpsp, render_tour};
use cellplan_core::scheduling::{solve_jobshop, solve_rcpsp, JobShopInstance, RcpspInstance};
use cellplan_core::tsp::{Tour, TspInstance};
use cellplan_core::SolveParams;
use roxmltree::Document;

fn instance(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn with_class<'a>(doc: &'a Document, class: &str) -> Vec<roxmltree::Node<'a, 'a>> {
    doc.descendants()
        .filter(|n| n.attribute("class").is_some_and(|c| c.split_whitespace().any(|w| w == class)))
        .collect()
}

fn attr(node: &roxmltree::Node, name: &str) -> f64 {
    node.attribute(name).unwrap().parse().unwrap()
}

#[test]
fn jobshop_chart_has_one_bar_per_operation() {
    let inst = JobShopInstance::from_json(&instance("jobshop.json")).unwrap();
    let (_, schedule) = solve_jobshop(&inst, &SolveParams::default()).unwrap();
    let schedule = schedule.unwrap();
    let svg = render_jobshop(&schedule, &inst);
    let doc = Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let tasks = with_class(&doc, "task");
    assert_eq!(tasks.len(), 9);
    let end = tasks.iter().map(|t| attr(t, "data-end")).fold(0.0, f64::max);
    assert_eq!(end, 7.0);
    let right = tasks.iter().map(|t| attr(t, "x") + attr(t, "width")).fold(0.0, f64::max);
    let left = tasks.iter().map(|t| attr(t, "x")).fold(f64::INFINITY, f64::min);
    let first_start = tasks.iter().map(|t| attr(t, "data-start")).fold(f64::INFINITY, f64::min);
    assert!(first_start == 0.0);
    assert!((right - left - 7.0 * 40.0).abs() < 1e-6);
}

#[test]
fn rcpsp_chart_skips_markers() {
    let inst = RcpspInstance::from_json(&instance("rcpsp.json")).unwrap();
    let (_, schedule) = solve_rcpsp(&inst, &SolveParams::default()).unwrap();
    let svg = render_rcpsp(&schedule.unwrap(), &inst);
    let doc = Document::parse(&svg).unwrap();
    assert_eq!(with_class(&doc, "task").len(), 10);
    assert_eq!(with_class(&doc, "usage").len(), 2);
}

#[test]
fn tour_drawing_has_every_node_and_hop() {
    let inst = TspInstance::from_json(&instance("tsp.json")).unwrap();
    let order: Vec<usize> = (0..inst.len()).chain([0]).collect();
    let tour = Tour { length: 0.0, order };
    let svg = render_tour(&tour, &inst, None);
    let doc = Document::parse(&svg).unwrap();
    assert_eq!(with_class(&doc, "node").len(), 14);
    assert_eq!(with_class(&doc, "edge").len(), 14);
    assert!(doc.descendants().any(|n| n.text() == Some("СКЛАД")));
}

#[test]
fn two_node_tour_draws_both_directions() {
    let inst = TspInstance::from_matrix(vec!["a<b".into(), "c&d".into()], vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
    let tour = Tour { order: vec![0, 1, 0], length: 4.0 };
    let svg = render_tour(&tour, &inst, Some(&[(10.0, 10.0), (50.0, 10.0)]));
    let doc = Document::parse(&svg).unwrap();
    assert_eq!(with_class(&doc, "edge").len(), 2);
    assert!(doc.descendants().any(|n| n.text() == Some("a<b")));
}

#[test]
fn facility_drawing_places_sites_and_customers() {
    let inst = FacilityInstance::from_json(&instance("facility.json")).unwrap();
    let (_, plan) = solve_facility(&inst, &SolveParams::default()).unwrap();
    let plan = plan.unwrap();
    let svg = render_facility(&plan, &inst);
    let doc = Document::parse(&svg).unwrap();
    let sites = with_class(&doc, "site");
    let customers = with_class(&doc, "customer");
    assert_eq!(sites.len() + customers.len(), 16);
    assert_eq!(sites.len(), 6);
    assert_eq!(with_class(&doc, "edge").len(), plan.shipments.len());
    // Glyph placement preserves the ordering of the input coordinates.
    let xs: Vec<f64> = customers.iter().map(|c| attr(c, "cx")).collect();
    for (i, a) in inst.customers.iter().enumerate() {
        for (j, b) in inst.customers.iter().enumerate() {
            if a.x < b.x {
                assert!(xs[i] < xs[j]);
            }
        }
    }
}

//! Logical Ethernet graph, spanning tree and failure simulation.
//!
//! Fiber edges depend on a live stretch of their cable: a cut at `x` drops
//! every edge whose interval contains `x`. Copper cross-links have no cable
//! dependency, which is what makes a pair of switches fed from opposite loop
//! ends survive any single cut.

mod graph;
mod scenario;
mod stp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::plant::{FiberPlant, Id, PlantError};
use crate::scalar::{Fmt, Scalar};

pub use graph::{
    build_graph, copper_edge_id, Edge, EdgeKind, Interval, LogicalGraph, Node, NodeKind,
    SWITCH_PRIORITY,
};
pub use scenario::{
    apply_scenario, scenario_from_json, scenario_to_json, FailureEvent, FailureScenario, LinkEnd,
};
pub use stp::{spanning_tree, SpanningTree};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FailsimError {
    #[error("unknown {kind} '{id}'")]
    UnknownElement { kind: &'static str, id: Id },
    #[error("cut at {chainage_m} m outside cable '{cable}' of length {length_m} m")]
    Chainage {
        cable: Id,
        chainage_m: f64,
        length_m: f64,
    },
    #[error("edge '{edge}' cost {cost} must be positive")]
    Cost { edge: Id, cost: f64 },
    #[error(transparent)]
    Plant(#[from] PlantError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachabilityReport {
    /// Switch id -> reachable, in id order.
    pub switches: BTreeMap<Id, bool>,
    /// Office id -> served by at least one reachable switch or outlet.
    pub offices: BTreeMap<Id, bool>,
    pub lost_user_ports: u64,
    pub blocking_edges: Vec<Id>,
}

impl ReachabilityReport {
    pub fn unreachable(&self) -> impl Iterator<Item = &str> {
        self.switches
            .iter()
            .filter(|(_, r)| !**r)
            .map(|(id, _)| id.as_str())
    }
}

/// Nodes with a path to a live core over usable edges.
pub fn reachable_nodes<S: Scalar>(graph: &LogicalGraph<S>) -> BTreeSet<Id> {
    let adj = graph.adjacency();
    let mut seen: BTreeSet<&str> = graph
        .nodes
        .iter()
        .filter(|n| n.alive && n.kind == NodeKind::Core)
        .map(|n| n.id.as_str())
        .collect();
    let mut stack: Vec<&str> = seen.iter().copied().collect();
    while let Some(u) = stack.pop() {
        for e in adj.get(u).into_iter().flatten() {
            let v = e.other(u);
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen.into_iter().map(str::to_string).collect()
}

fn report_with_blocking<S: Scalar>(graph: &LogicalGraph<S>, blocking: Vec<Id>) -> ReachabilityReport {
    let reach = reachable_nodes(graph);
    let mut switches = BTreeMap::new();
    let mut offices: BTreeMap<Id, bool> = graph.offices.iter().map(|o| (o.clone(), false)).collect();
    let mut lost = 0u64;
    for n in &graph.nodes {
        let ok = n.alive && reach.contains(&n.id);
        if n.kind == NodeKind::Switch {
            switches.insert(n.id.clone(), ok);
            if !ok {
                lost += u64::from(n.user_ports);
            }
        }
        if let Some(o) = &n.office {
            let served = offices.entry(o.clone()).or_insert(false);
            *served |= ok;
        }
    }
    ReachabilityReport {
        switches,
        offices,
        lost_user_ports: lost,
        blocking_edges: blocking,
    }
}

/// Reachability of every switch and office; blocking edges are those of the
/// spanning tree of `graph` itself.
pub fn reachability<S: Scalar>(graph: &LogicalGraph<S>) -> ReachabilityReport {
    let blocking = spanning_tree(graph).blocking.into_iter().collect();
    report_with_blocking(graph, blocking)
}

/// Applies `scenario` to `graph` and reports reachability, listing the
/// blocking edges of the pre-failure spanning tree.
pub fn whatif<S: Scalar>(
    graph: &LogicalGraph<S>,
    scenario: &FailureScenario<S>,
) -> Result<ReachabilityReport, FailsimError> {
    let blocking = spanning_tree(graph).blocking.into_iter().collect();
    let after = apply_scenario(graph, scenario)?;
    Ok(report_with_blocking(&after, blocking))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalityRow {
    pub event: String,
    pub lost_user_ports: u64,
    pub unreachable: Vec<Id>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalityReport {
    pub rows: Vec<CriticalityRow>,
    /// First row with the most lost ports.
    pub worst: Option<CriticalityRow>,
    pub max_cable_cut_loss: u64,
    pub max_device_loss: u64,
}

impl CriticalityReport {
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["event", "lost_user_ports", "unreachable"])?;
        for r in &self.rows {
            w.write_record([
                r.event.as_str(),
                &r.lost_user_ports.to_string(),
                &r.unreachable.join(";"),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("utf-8 records"))
    }
}

/// One cut position per maximal stretch between consecutive cut points
/// (cable ends and box chainages) of each cable.
pub fn representative_cuts<S: Scalar>(plant: &FiberPlant<S>) -> Vec<FailureEvent<S>> {
    let mut out = Vec::new();
    for cable in &plant.loops {
        let mut points = vec![S::zero()];
        points.extend(plant.boxes_on_cable(&cable.id).iter().map(|b| b.chainage_m));
        points.push(cable.length_m);
        points.dedup();
        for w in points.windows(2) {
            if w[0] < w[1] {
                out.push(FailureEvent::CableCut {
                    cable: cable.id.clone(),
                    chainage_m: S::midpoint(w[0], w[1]),
                });
            }
        }
    }
    out
}

/// Every single failure: representative cable cuts, then each core, box,
/// switch and core-side transceiver.
pub fn single_failure_events<S: Scalar>(plant: &FiberPlant<S>) -> Vec<FailureEvent<S>> {
    let mut events = representative_cuts(plant);
    events.extend(plant.cores.iter().map(|c| FailureEvent::CoreFail { core: c.id.clone() }));
    events.extend(plant.boxes.iter().map(|b| FailureEvent::BoxFail { box_id: b.id.clone() }));
    events.extend(
        plant
            .switches
            .iter()
            .map(|s| FailureEvent::SwitchFail { switch: s.id.clone() }),
    );
    events.extend(
        plant
            .uplinks
            .iter()
            .filter(|u| !matches!(u.target, crate::plant::UplinkTarget::Reserved(_)))
            .map(|u| FailureEvent::TransceiverFail {
                uplink: u.id.clone(),
                end: LinkEnd::Core,
            }),
    );
    events
}

/// Evaluates every single failure in parallel; rows keep event order.
pub fn enumerate_single_failures<S: Scalar>(
    plant: &FiberPlant<S>,
) -> Result<CriticalityReport, FailsimError> {
    let graph = build_graph(plant)?;
    let events = single_failure_events(plant);
    let rows = events
        .par_iter()
        .map(|ev| {
            let after = apply_scenario(&graph, &FailureScenario::single(ev.clone()))?;
            let report = report_with_blocking(&after, Vec::new());
            Ok((
                matches!(ev, FailureEvent::CableCut { .. }),
                CriticalityRow {
                    event: ev.to_string(),
                    lost_user_ports: report.lost_user_ports,
                    unreachable: report.unreachable().map(str::to_string).collect(),
                },
            ))
        })
        .collect::<Result<Vec<_>, FailsimError>>()?;
    let max_of = |cut: bool| {
        rows.iter()
            .filter(|(c, _)| *c == cut)
            .map(|(_, r)| r.lost_user_ports)
            .max()
            .unwrap_or(0)
    };
    let max_cable_cut_loss = max_of(true);
    let max_device_loss = max_of(false);
    let rows: Vec<CriticalityRow> = rows.into_iter().map(|(_, r)| r).collect();
    let mut worst: Option<&CriticalityRow> = None;
    for r in &rows {
        if worst.is_none_or(|w| r.lost_user_ports > w.lost_user_ports) {
            worst = Some(r);
        }
    }
    Ok(CriticalityReport {
        worst: worst.cloned(),
        rows,
        max_cable_cut_loss,
        max_device_loss,
    })
}

/// Graphviz rendering. Blocking edges of `tree` are dashed.
pub fn to_dot<S: Scalar>(graph: &LogicalGraph<S>, tree: Option<&SpanningTree<S>>) -> String {
    let mut out = String::from("graph ftto {\n");
    for n in &graph.nodes {
        let shape = match n.kind {
            NodeKind::Core => "box",
            NodeKind::Switch => "ellipse",
            NodeKind::Outlet => "diamond",
        };
        let style = if n.alive { "" } else { ", style=dotted" };
        let _ = writeln!(out, "  \"{}\" [shape={shape}{style}];", n.id);
    }
    for e in &graph.edges {
        let label = match &e.kind {
            EdgeKind::Fiber { cable, interval, .. } => format!("{cable} {interval}"),
            EdgeKind::Copper => "cu".to_string(),
            EdgeKind::CoreInterconnect => "core".to_string(),
        };
        let mut attrs = format!("label=\"{label}\"");
        if tree.is_some_and(|t| t.blocking.contains(&e.id)) || !e.enabled {
            attrs.push_str(", style=dashed");
        }
        if e.cost != S::one() {
            let _ = write!(attrs, ", weight=\"{}\"", Fmt(e.cost));
        }
        let _ = writeln!(out, "  \"{}\" -- \"{}\" [id=\"{}\", {attrs}];", e.a, e.b, e.id);
    }
    out.push_str("}\n");
    out
}

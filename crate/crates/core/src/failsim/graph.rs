use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::FailsimError;
use crate::plant::{FiberPlant, Id, PlantError, Side, UplinkTarget};
use crate::scalar::Scalar;

/// Live stretch of a cable that a fiber edge depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<S> {
    pub lo: S,
    pub hi: S,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<S: Scalar> Interval<S> {
    /// `[0, p)` toward A, `(p, L]` toward B.
    pub fn for_tap(side: Side, chainage: S, length: S) -> Self {
        match side {
            Side::TowardA => Interval {
                lo: S::zero(),
                hi: chainage,
                lo_closed: true,
                hi_closed: false,
            },
            Side::TowardB => Interval {
                lo: chainage,
                hi: length,
                lo_closed: false,
                hi_closed: true,
            },
        }
    }

    pub fn contains(&self, x: S) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::scalar::Fmt;
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            Fmt(self.lo),
            Fmt(self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Core,
    Switch,
    Outlet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: Id,
    pub kind: NodeKind,
    pub priority: u32,
    pub user_ports: u32,
    pub office: Option<Id>,
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeKind<S> {
    Fiber {
        uplink: Id,
        cable: Id,
        box_id: Id,
        interval: Interval<S>,
    },
    Copper,
    CoreInterconnect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<S> {
    pub id: Id,
    pub a: Id,
    pub b: Id,
    pub kind: EdgeKind<S>,
    pub cost: S,
    /// Administratively enabled.
    pub enabled: bool,
}

impl<S> Edge<S> {
    pub fn other(&self, node: &str) -> &str {
        if self.a == node {
            &self.b
        } else {
            &self.a
        }
    }

    pub fn is_fiber(&self) -> bool {
        matches!(self.kind, EdgeKind::Fiber { .. })
    }
}

/// Bridge priority given to edge switches and outlets.
pub const SWITCH_PRIORITY: u32 = 32768;

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalGraph<S> {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge<S>>,
    /// Cable lengths, to validate cut positions.
    pub cables: BTreeMap<Id, S>,
    pub boxes: BTreeSet<Id>,
    pub offices: Vec<Id>,
}

impl<S: Scalar> LogicalGraph<S> {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge<S>> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn fiber_edges(&self) -> impl Iterator<Item = &Edge<S>> {
        self.edges.iter().filter(|e| e.is_fiber())
    }

    pub fn copper_edges(&self) -> impl Iterator<Item = &Edge<S>> {
        self.edges.iter().filter(|e| matches!(e.kind, EdgeKind::Copper))
    }

    /// Sets one edge's path cost. Costs must be positive.
    pub fn set_cost(&mut self, edge: &str, cost: S) -> Result<(), FailsimError> {
        if cost <= S::zero() {
            return Err(FailsimError::Cost {
                edge: edge.to_string(),
                cost: cost.to_document(),
            });
        }
        let e = self
            .edges
            .iter_mut()
            .find(|e| e.id == edge)
            .ok_or_else(|| FailsimError::UnknownElement {
                kind: "edge",
                id: edge.to_string(),
            })?;
        e.cost = cost;
        Ok(())
    }

    pub fn set_enabled(&mut self, edge: &str, enabled: bool) -> Result<(), FailsimError> {
        let e = self
            .edges
            .iter_mut()
            .find(|e| e.id == edge)
            .ok_or_else(|| FailsimError::UnknownElement {
                kind: "edge",
                id: edge.to_string(),
            })?;
        e.enabled = enabled;
        Ok(())
    }

    /// Removes an edge by id; returns whether it existed.
    pub fn remove_edge(&mut self, id: &str) -> bool {
        let before = self.edges.len();
        self.edges.retain(|e| e.id != id);
        before != self.edges.len()
    }

    /// Marks a node failed and drops its edges.
    pub fn fail_node(&mut self, id: &str) -> bool {
        let Some(n) = self.nodes.iter_mut().find(|n| n.id == id) else {
            return false;
        };
        n.alive = false;
        self.edges.retain(|e| e.a != id && e.b != id);
        true
    }

    /// Usable adjacency: enabled edges between live nodes, sorted by edge id.
    pub(crate) fn adjacency(&self) -> BTreeMap<&str, Vec<&Edge<S>>> {
        let alive: BTreeSet<&str> = self
            .nodes
            .iter()
            .filter(|n| n.alive)
            .map(|n| n.id.as_str())
            .collect();
        let mut adj: BTreeMap<&str, Vec<&Edge<S>>> =
            alive.iter().map(|&id| (id, Vec::new())).collect();
        for e in &self.edges {
            if e.enabled && e.a != e.b && alive.contains(e.a.as_str()) && alive.contains(e.b.as_str()) {
                adj.get_mut(e.a.as_str()).expect("live").push(e);
                adj.get_mut(e.b.as_str()).expect("live").push(e);
            }
        }
        for list in adj.values_mut() {
            list.sort_by(|x, y| x.id.cmp(&y.id));
        }
        adj
    }
}

fn outlet_node(office: &str) -> Id {
    format!("outlet:{office}")
}

pub fn copper_edge_id(a: &str, b: &str) -> Id {
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    format!("cu:{x}~{y}")
}

/// Logical Ethernet graph: one fiber edge per uplink that reaches a switch
/// or an outlet, one copper edge per cross-linked pair, and the core
/// interconnect on dual-core sites.
pub fn build_graph<S: Scalar>(plant: &FiberPlant<S>) -> Result<LogicalGraph<S>, FailsimError> {
    let mut nodes = Vec::new();
    for c in &plant.cores {
        nodes.push(Node {
            id: c.id.clone(),
            kind: NodeKind::Core,
            priority: c.bridge_priority,
            user_ports: 0,
            office: None,
            alive: true,
        });
    }
    for s in &plant.switches {
        nodes.push(Node {
            id: s.id.clone(),
            kind: NodeKind::Switch,
            priority: SWITCH_PRIORITY,
            user_ports: s.user_port_count(),
            office: Some(s.office.clone()),
            alive: true,
        });
    }
    let outlets: BTreeSet<&str> = plant
        .uplinks
        .iter()
        .filter_map(|u| match &u.target {
            UplinkTarget::Outlet(o) => Some(o.as_str()),
            _ => None,
        })
        .collect();
    for o in outlets {
        nodes.push(Node {
            id: outlet_node(o),
            kind: NodeKind::Outlet,
            priority: SWITCH_PRIORITY,
            user_ports: 0,
            office: Some(o.to_string()),
            alive: true,
        });
    }

    let one = S::one();
    let mut edges = Vec::new();
    for u in &plant.uplinks {
        let far = match &u.target {
            UplinkTarget::Switch(id) => id.clone(),
            UplinkTarget::Outlet(o) => outlet_node(o),
            UplinkTarget::Reserved(_) => continue,
        };
        let (bx, _) = plant.find_tap(&u.tap).ok_or_else(|| {
            FailsimError::Plant(PlantError::Reference {
                path: format!("uplinks[{}]", u.id),
                kind: "tap",
                id: u.tap.to_string(),
            })
        })?;
        let cable = plant.cable(&u.tap.cable).ok_or_else(|| FailsimError::UnknownElement {
            kind: "cable",
            id: u.tap.cable.clone(),
        })?;
        edges.push(Edge {
            id: u.id.clone(),
            a: u.core_port.core.clone(),
            b: far,
            kind: EdgeKind::Fiber {
                uplink: u.id.clone(),
                cable: cable.id.clone(),
                box_id: bx.id.clone(),
                interval: Interval::for_tap(u.tap.side, bx.chainage_m, cable.length_m),
            },
            cost: one,
            enabled: true,
        });
    }
    for s in &plant.switches {
        let Some(peer_id) = &s.cross_link_peer else {
            continue;
        };
        let peer = plant.switch(peer_id);
        let symmetric = peer.is_some_and(|p| p.cross_link_peer.as_deref() == Some(s.id.as_str()));
        if !symmetric {
            return Err(FailsimError::Plant(PlantError::Invariant {
                path: format!("switches[{}].cross_link_peer", s.id),
                message: format!("cross-link to '{peer_id}' is not reciprocated"),
            }));
        }
        if s.id < *peer_id {
            edges.push(Edge {
                id: copper_edge_id(&s.id, peer_id),
                a: s.id.clone(),
                b: peer_id.clone(),
                kind: EdgeKind::Copper,
                cost: one,
                enabled: true,
            });
        }
    }
    if plant.core_interconnect && plant.cores.len() == 2 {
        let (a, b) = (&plant.cores[0].id, &plant.cores[1].id);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        edges.push(Edge {
            id: format!("core:{a}~{b}"),
            a: a.clone(),
            b: b.clone(),
            kind: EdgeKind::CoreInterconnect,
            cost: one,
            enabled: true,
        });
    }

    Ok(LogicalGraph {
        nodes,
        edges,
        cables: plant
            .loops
            .iter()
            .map(|c| (c.id.clone(), c.length_m))
            .collect(),
        boxes: plant.boxes.iter().map(|b| b.id.clone()).collect(),
        offices: plant.offices.iter().map(|o| o.id.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_membership() {
        let a = Interval::for_tap(Side::TowardA, 10.0, 100.0);
        assert!(a.contains(0.0) && a.contains(5.0));
        assert!(!a.contains(10.0));
        let b = Interval::for_tap(Side::TowardB, 60.0, 100.0);
        assert!(!b.contains(60.0) && b.contains(60.5) && b.contains(100.0));
        assert_eq!(b.to_string(), "(60, 100]");
        assert_eq!(a.to_string(), "[0, 10)");
    }

    #[test]
    fn copper_ids_are_ordered() {
        assert_eq!(copper_edge_id("s2", "s1"), "cu:s1~s2");
    }
}

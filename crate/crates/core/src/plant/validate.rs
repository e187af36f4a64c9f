use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::*;
use crate::alloc::{reserve_report, RESERVE_WARNING_FLOOR};
use crate::estimate::PATCH_CORD_LENGTHS;
use crate::labels::is_cable_symbol;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level} {}: {}", self.path, self.message)
    }
}

struct Sink(Vec<Violation>);

impl Sink {
    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            severity: Severity::Warning,
            path: path.into(),
            message: message.into(),
        });
    }
}

pub const POLISH_MISMATCH: &str = "polish mismatch LC/APC\u{2194}LC/UPC";

/// Checks every plant invariant. Returns an empty list iff the plant is
/// clean; warnings do not make a plant invalid.
pub fn validate_plant<S: Scalar>(plant: &FiberPlant<S>) -> Vec<Violation> {
    let mut out = Sink(Vec::new());
    check_cores(plant, &mut out);
    check_loops(plant, &mut out);
    check_taps(plant, &mut out);
    check_switches(plant, &mut out);
    check_offices(plant, &mut out);
    check_uplinks(plant, &mut out);
    check_polish(plant, &mut out);
    check_reserve(plant, &mut out);
    out.0
}

fn check_cores<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    if !(1..=2).contains(&plant.cores.len()) && !(plant.cores.is_empty() && plant.loops.is_empty()) {
        out.error(
            "cores",
            format!("site needs one or two cores, found {}", plant.cores.len()),
        );
    }
}

fn check_loops<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    if plant.loops.len() > 9 {
        out.warn("loops", "more than 9 loops; box names use a single loop digit");
    }
    let mut symbols = BTreeSet::new();
    for (i, c) in plant.loops.iter().enumerate() {
        let path = format!("loops[{i}]");
        if c.length_m <= S::zero() {
            out.error(&path, "length must be positive");
        }
        if c.tube_count == 0 || c.fibers_per_tube == 0 {
            out.error(&path, "tube and fiber counts must be positive");
        }
        if !is_cable_symbol(c.symbol) {
            out.error(&path, format!("cable symbol '{}' is not a digit or uppercase letter", c.symbol));
        } else if !symbols.insert(c.symbol) {
            out.error(&path, format!("cable symbol '{}' used twice", c.symbol));
        }
        for (j, pair) in c.box_positions.windows(2).enumerate() {
            if pair[1].1 <= pair[0].1 {
                out.error(
                    format!("{path}.boxes[{}]", j + 1),
                    format!(
                        "chainages strictly increasing: box '{}' at {} follows '{}' at {}",
                        pair[1].0, pair[1].1, pair[0].0, pair[0].1
                    ),
                );
            }
        }
        for (box_id, chainage) in &c.box_positions {
            if *chainage <= S::zero() || *chainage >= c.length_m {
                out.error(
                    format!("boxes.{box_id}"),
                    format!("chainage {chainage} outside (0, {})", c.length_m),
                );
            }
        }
        if c.box_positions.len() > 99 {
            out.warn(&path, "more than 99 boxes; box numbers use two digits");
        }
        if c.point_to_point && c.box_positions.len() > 1 {
            out.error(&path, "point-to-point run serves a single box");
        }
        if c.end_a_core != c.end_b_core && c.point_to_point {
            out.error(&path, "point-to-point run has a single core end");
        }
    }
}

/// (cable, tube) -> side -> (box id, chainage, path)
type TapsByTube<'a, S> = BTreeMap<(&'a str, u32), BTreeMap<Side, (&'a str, S, String)>>;

fn check_taps<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    let mut seen: TapsByTube<'_, S> = BTreeMap::new();
    for (bi, b) in plant.boxes.iter().enumerate() {
        let Some(cable) = plant.cable(&b.cable) else {
            continue;
        };
        for (ti, t) in b.taps.iter().enumerate() {
            let path = format!("boxes[{bi}].taps[{ti}]");
            if t.tube == 0 || t.tube > cable.tube_count {
                out.error(&path, format!("tube {} outside 1..={}", t.tube, cable.tube_count));
                continue;
            }
            if t.spliced_fibers.is_empty() {
                out.error(&path, "no spliced fibers");
            }
            if let Some(f) = t
                .spliced_fibers
                .iter()
                .find(|&&f| f == 0 || f > cable.fibers_per_tube)
            {
                out.error(&path, format!("fiber {f} outside 1..={}", cable.fibers_per_tube));
            }
            if cable.point_to_point && t.side == Side::TowardB {
                out.error(&path, "point-to-point run has no return leg");
            }
            let slot = seen.entry((cable.id.as_str(), t.tube)).or_default();
            if slot.contains_key(&t.side) {
                out.error(
                    &path,
                    format!("tube {} already tapped {:?} on cable '{}'", t.tube, t.side, cable.id),
                );
                continue;
            }
            slot.insert(t.side, (b.id.as_str(), b.chainage_m, path));
        }
    }
    for ((cable, tube), sides) in &seen {
        let (Some(a), Some(bb)) = (sides.get(&Side::TowardA), sides.get(&Side::TowardB)) else {
            continue;
        };
        let same_box = a.0 == bb.0;
        if a.1 > bb.1 {
            out.error(
                &bb.2,
                format!(
                    "tap order violated: tube {tube} on '{cable}' tapped TowardA at {} after TowardB at {}",
                    a.1, bb.1
                ),
            );
        } else if same_box {
            if plant.allow_same_box_double_tap {
                out.warn(&bb.2, format!("tube {tube} tapped both ways at box '{}'", a.0));
            } else {
                out.error(
                    &bb.2,
                    format!("tube {tube} tapped both ways at box '{}' (same-box double tap not allowed)", a.0),
                );
            }
        }
    }
}

fn check_switches<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    let by_id: HashMap<&str, &EdgeSwitch<S>> =
        plant.switches.iter().map(|s| (s.id.as_str(), s)).collect();
    for (i, s) in plant.switches.iter().enumerate() {
        let path = format!("switches[{i}]");
        if let Some(peer_id) = &s.cross_link_peer {
            match by_id.get(peer_id.as_str()) {
                _ if peer_id == &s.id => out.error(&path, "switch cross-linked to itself"),
                Some(peer) => {
                    if peer.cross_link_peer.as_deref() != Some(s.id.as_str()) {
                        out.error(&path, format!("cross-link to '{peer_id}' is not symmetric"));
                    }
                    if !s.internal_rj45 || !peer.internal_rj45 {
                        out.error(&path, "cross-link needs an internal RJ45 port on both switches");
                    }
                }
                None => out.error(&path, format!("unknown cross-link peer '{peer_id}'")),
            }
        }
        if let Some(active) = s.active_ports {
            if active > s.user_port_count() {
                out.error(&path, format!("{active} active ports on a {}-port switch", s.user_port_count()));
            }
        }
        if let Some(len) = s.patch_cord_m {
            if !PATCH_CORD_LENGTHS.contains(&len) {
                out.warn(&path, format!("patch cord {len} m is not a standard length"));
            }
        }
        let uplinks: Vec<_> = plant
            .uplinks
            .iter()
            .filter(|u| u.switch_id() == Some(s.id.as_str()))
            .collect();
        if uplinks.len() > 1 {
            out.error(&path, format!("{} uplinks target one SFP port", uplinks.len()));
        }
    }
}

fn check_offices<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    let mut rooms = BTreeSet::new();
    for (i, o) in plant.offices.iter().enumerate() {
        if o.room.trim().is_empty() {
            out.error(format!("offices[{i}]"), "empty room code");
        } else if !rooms.insert(o.room.to_lowercase()) {
            out.error(format!("offices[{i}]"), format!("room code '{}' used twice", o.room));
        }
    }
}

fn check_uplinks<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    let mut used_fibers: BTreeSet<(&TapRef, u32)> = BTreeSet::new();
    let mut used_ports: BTreeSet<(&str, u32)> = BTreeSet::new();
    for (i, u) in plant.uplinks.iter().enumerate() {
        let path = format!("uplinks[{i}]");
        let Some((bx, tap)) = plant.find_tap(&u.tap) else {
            out.error(&path, format!("no tap {} for uplink", u.tap));
            continue;
        };
        match u.mode {
            UplinkMode::Duplex => {
                let ok = u.fibers.len() == 2 && u.fibers[0] % 2 == 1 && u.fibers[1] == u.fibers[0] + 1;
                if !ok {
                    out.error(&path, format!("duplex fibers {:?} are not a pair (2k-1, 2k)", u.fibers));
                }
                if u.bidi.is_some() {
                    out.error(&path, "duplex uplink carries BiDi polarity");
                }
            }
            UplinkMode::Simplex => {
                if u.fibers.len() != 1 {
                    out.error(&path, format!("simplex uplink uses {} fibers", u.fibers.len()));
                }
                match u.bidi {
                    None => out.error(&path, "simplex uplink without BiDi polarity"),
                    Some(p) if !p.is_matched() => out.error(&path, "bidi polarity mismatch"),
                    Some(_) => {}
                }
            }
        }
        for &f in &u.fibers {
            if !tap.spliced_fibers.contains(&f) {
                out.error(&path, format!("fiber {f} not spliced at box '{}'", bx.id));
            }
            if !used_fibers.insert((&u.tap, f)) {
                out.error(&path, format!("fiber {f} of {} used twice", u.tap));
            }
        }
        if u.transceiver_polish != Polish::Upc {
            out.error(&path, "SFP transceivers are LC/UPC");
        }
        if let Some(cable) = plant.cable(&u.tap.cable) {
            let expected = cable.core_for(u.tap.side);
            if u.core_port.core != expected {
                out.error(
                    &path,
                    format!("{} lands on core '{expected}', not '{}'", u.tap, u.core_port.core),
                );
            }
        }
        if let Some(core) = plant.core(&u.core_port.core) {
            if u.core_port.port >= core.sfp_port_count {
                out.error(
                    &path,
                    format!("core port {} beyond {} SFP ports", u.core_port.port, core.sfp_port_count),
                );
            }
        }
        if !used_ports.insert((u.core_port.core.as_str(), u.core_port.port)) {
            out.error(
                &path,
                format!("core port {}:{} assigned twice", u.core_port.core, u.core_port.port),
            );
        }
        if let UplinkTarget::Switch(sid) = &u.target {
            if let Some(sw) = plant.switch(sid) {
                if sw.box_id != bx.id {
                    out.error(&path, format!("switch '{sid}' is patched to box '{}', not '{}'", sw.box_id, bx.id));
                }
            }
        }
    }
}

fn check_polish<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    for (i, u) in plant.uplinks.iter().enumerate() {
        let Some((bx, _)) = plant.find_tap(&u.tap) else {
            continue;
        };
        if bx.port_polish == Polish::Apc {
            let hybrid = u
                .switch_id()
                .and_then(|id| plant.switch(id))
                .is_some_and(|s| s.hybrid_cord);
            if !hybrid {
                out.warn(format!("uplinks[{i}]"), format!("{POLISH_MISMATCH} at box '{}'", bx.id));
            }
        }
    }
    for (i, c) in plant.loops.iter().enumerate() {
        let has_uplinks = plant.uplinks.iter().any(|u| u.tap.cable == c.id);
        if c.polish == Polish::Apc && !c.panel_hybrid_cords && has_uplinks {
            out.warn(format!("loops[{i}]"), format!("{POLISH_MISMATCH} at the central panel"));
        }
    }
}

fn check_reserve<S: Scalar>(plant: &FiberPlant<S>, out: &mut Sink) {
    let floor = S::from_document(RESERVE_WARNING_FLOOR).expect("reserve floor");
    for r in reserve_report(plant) {
        if r.tube_side_reserve < floor {
            let i = plant.cable_index(&r.cable).unwrap_or_default();
            out.warn(
                format!("loops[{i}]"),
                format!(
                    "tube reserve {:.1} % below 20 %",
                    r.tube_side_reserve.to_document() * 100.0
                ),
            );
        }
    }
}

//! Physical fiber plant: loop cables, breakout boxes, tube taps, uplinks and
//! the devices they connect.
//!
//! A [`FiberPlant`] is immutable once loaded. Planning operations return new
//! values (plans, reports, graphs) and produce a new plant when applied.

mod document;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::estimate::{CostModel, MtbfSpec, PowerModel, PoeClass};
use crate::labels::{ColorScheme, DirectionLetters};
use crate::scalar::Scalar;

pub use document::{
    assemble_plant, load_plant, load_plant_str, parse_document, plant_to_document, plant_to_json,
    BoxDoc, CoreDoc, LoopDoc, ModelsDoc, OfficeDoc, PlantDocument, SiteDoc, SwitchDoc, TapDoc,
    BidiDoc, TargetDoc, UplinkDoc, SCHEMA_VERSION,
};
pub(crate) use document::{uplink_from_doc, uplink_to_doc};
pub use validate::{validate_plant, Severity, Violation};

pub type Id = String;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("reference error at {path}: unknown {kind} '{id}'")]
    Reference {
        path: String,
        kind: &'static str,
        id: String,
    },
    #[error("invariant error at {path}: {message}")]
    Invariant { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FiberGrade {
    #[serde(rename = "OS1")]
    Os1,
    #[serde(rename = "OS2")]
    Os2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Connector {
    #[serde(rename = "LC")]
    Lc,
    #[serde(rename = "SC")]
    Sc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polish {
    #[serde(rename = "UPC")]
    Upc,
    #[serde(rename = "APC")]
    Apc,
}

/// Direction a tapped tube runs from its breakout box back to the panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    TowardA,
    TowardB,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::TowardA, Side::TowardB];

    pub fn other(self) -> Side {
        match self {
            Side::TowardA => Side::TowardB,
            Side::TowardB => Side::TowardA,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::TowardA => 'A',
            Side::TowardB => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UplinkMode {
    Duplex,
    Simplex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchKind {
    /// Trunking-mounted micro-switch, four front ports.
    Micro4,
    /// Eight-port mini-switch sharing one 1 Gb/s uplink.
    Mini8,
}

impl SwitchKind {
    pub fn user_ports(self) -> u32 {
        match self {
            SwitchKind::Micro4 => 4,
            SwitchKind::Mini8 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerSource {
    Mains230,
    Transformer54,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Bureau,
    Couloir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Up,
    Down,
}

impl Polarity {
    pub fn paired(self) -> Polarity {
        match self {
            Polarity::Up => Polarity::Down,
            Polarity::Down => Polarity::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopCable<S> {
    pub id: Id,
    /// Single-character cable number used in fiber references.
    pub symbol: char,
    pub length_m: S,
    pub tube_count: u32,
    pub fibers_per_tube: u32,
    pub end_a_core: Id,
    pub end_b_core: Id,
    pub fiber_grade: FiberGrade,
    /// G657a bend-insensitive fiber.
    pub bend_insensitive: bool,
    pub connector: Connector,
    pub polish: Polish,
    /// Pre-connectorized run from the core to a single box, no return leg.
    pub point_to_point: bool,
    /// Hybrid APC/UPC cords are stocked at the central panel.
    pub panel_hybrid_cords: bool,
    /// Boxes on this cable in document order, with their chainage.
    pub box_positions: Vec<(Id, S)>,
}

impl<S: Scalar> LoopCable<S> {
    pub fn total_fibers(&self) -> u32 {
        self.tube_count * self.fibers_per_tube
    }

    /// Cable ends terminated on the central panel.
    pub fn panel_ends(&self) -> u32 {
        if self.point_to_point {
            1
        } else {
            2
        }
    }

    pub fn core_for(&self, side: Side) -> &str {
        match side {
            Side::TowardA => &self.end_a_core,
            Side::TowardB => &self.end_b_core,
        }
    }

    pub fn sides(&self) -> &'static [Side] {
        if self.point_to_point {
            &Side::BOTH[..1]
        } else {
            &Side::BOTH
        }
    }
}

/// A tube cut at a breakout box, with the fibers spliced to box ports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubeTap {
    pub cable: Id,
    /// 1-based tube index.
    pub tube: u32,
    pub side: Side,
    pub box_id: Id,
    /// 1-based fiber indices spliced to pigtails.
    pub spliced_fibers: BTreeSet<u32>,
}

impl TubeTap {
    pub fn tap_ref(&self) -> TapRef {
        TapRef {
            cable: self.cable.clone(),
            tube: self.tube,
            side: self.side,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TapRef {
    pub cable: Id,
    pub tube: u32,
    pub side: Side,
}

impl fmt::Display for TapRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}{}", self.cable, self.tube, self.side.letter())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakoutBox<S> {
    pub id: Id,
    pub cable: Id,
    pub chainage_m: S,
    pub taps: Vec<TubeTap>,
    pub port_polish: Polish,
}

impl<S> BreakoutBox<S> {
    pub fn exposed_port_count(&self) -> usize {
        self.taps.iter().map(|t| t.spliced_fibers.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorePort {
    pub core: Id,
    pub port: u32,
}

/// What sits at the office end of an uplink.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UplinkTarget {
    Switch(Id),
    /// Direct optical outlet in the office trunking.
    Outlet(Id),
    /// Provisioned for a future switch of the given kind.
    Reserved(SwitchKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BidiPolarity {
    pub core_end: Polarity,
    pub switch_end: Polarity,
}

impl BidiPolarity {
    pub const STANDARD: BidiPolarity = BidiPolarity {
        core_end: Polarity::Up,
        switch_end: Polarity::Down,
    };

    pub fn is_matched(&self) -> bool {
        self.core_end != self.switch_end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Uplink {
    pub id: Id,
    pub mode: UplinkMode,
    pub tap: TapRef,
    /// One fiber (simplex) or the consecutive pair `(2k-1, 2k)` (duplex).
    pub fibers: Vec<u32>,
    /// Transceivers are LC/UPC.
    pub transceiver_polish: Polish,
    pub bidi: Option<BidiPolarity>,
    pub core_port: CorePort,
    pub target: UplinkTarget,
}

impl Uplink {
    pub fn uplink_id(tap: &TapRef, first_fiber: u32) -> Id {
        format!("{tap}:{first_fiber}")
    }

    /// 1-based pair number of the first fiber within its tap.
    pub fn pair_no(&self) -> u32 {
        self.fibers[0].div_ceil(2)
    }

    pub fn switch_id(&self) -> Option<&str> {
        match &self.target {
            UplinkTarget::Switch(id) => Some(id),
            _ => None,
        }
    }

    /// Kind of switch this uplink feeds or is provisioned for.
    pub fn served_kind<S: Scalar>(&self, plant: &FiberPlant<S>) -> Option<SwitchKind> {
        match &self.target {
            UplinkTarget::Switch(id) => plant.switch(id).map(|s| s.kind),
            UplinkTarget::Reserved(kind) => Some(*kind),
            UplinkTarget::Outlet(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoeDevice<S> {
    pub name: String,
    pub power_w: S,
    pub cord_m: S,
    pub class: PoeClass,
    /// Device can be switched off overnight.
    pub night_off: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSwitch<S> {
    pub id: Id,
    pub kind: SwitchKind,
    pub office: Id,
    pub box_id: Id,
    pub internal_rj45: bool,
    pub poe_capable: bool,
    pub power_source: PowerSource,
    pub cross_link_peer: Option<Id>,
    pub placement: Placement,
    pub seq: u32,
    pub model: Option<String>,
    pub patch_cord_m: Option<u32>,
    /// Patch cord is an LC/APC to LC/UPC hybrid.
    pub hybrid_cord: bool,
    pub active_ports: Option<u32>,
    pub poe_devices: Vec<PoeDevice<S>>,
    pub poe_budget_w: Option<S>,
    /// Free-form datacentre fields (rack, stack, drawer).
    pub extra: BTreeMap<String, String>,
}

impl<S> EdgeSwitch<S> {
    pub fn user_port_count(&self) -> u32 {
        self.kind.user_ports()
    }

    pub fn idle_ports(&self) -> u32 {
        match self.active_ports {
            Some(active) => self.user_port_count().saturating_sub(active),
            None => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreSwitch {
    pub id: Id,
    pub sfp_port_count: u32,
    pub bridge_priority: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Office {
    pub id: Id,
    pub building: String,
    pub floor: String,
    pub room: String,
}

impl Office {
    pub fn location(&self) -> String {
        format!("{}-{}-{}", self.building, self.floor, self.room)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchModel<S> {
    pub name: String,
    pub base_draw_w: Option<S>,
    pub mtbf_hours: Option<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberPlant<S> {
    pub site_name: String,
    pub loops: Vec<LoopCable<S>>,
    pub cores: Vec<CoreSwitch>,
    pub boxes: Vec<BreakoutBox<S>>,
    pub switches: Vec<EdgeSwitch<S>>,
    pub offices: Vec<Office>,
    pub uplinks: Vec<Uplink>,
    pub cost_model: CostModel<S>,
    pub power_model: PowerModel<S>,
    pub mtbf: MtbfSpec<S>,
    pub switch_models: Vec<SwitchModel<S>>,
    pub color_scheme: ColorScheme,
    pub direction_letters: DirectionLetters,
    pub allow_same_box_double_tap: bool,
    /// Datacentre link between the two cores of a dual-core site.
    pub core_interconnect: bool,
}

impl<S: Scalar> FiberPlant<S> {
    pub fn empty(site_name: impl Into<String>) -> Self {
        FiberPlant {
            site_name: site_name.into(),
            loops: Vec::new(),
            cores: Vec::new(),
            boxes: Vec::new(),
            switches: Vec::new(),
            offices: Vec::new(),
            uplinks: Vec::new(),
            cost_model: CostModel::default(),
            power_model: PowerModel::default(),
            mtbf: MtbfSpec::default(),
            switch_models: Vec::new(),
            color_scheme: ColorScheme::Fotag,
            direction_letters: DirectionLetters::AR,
            allow_same_box_double_tap: false,
            core_interconnect: true,
        }
    }

    pub fn cable(&self, id: &str) -> Option<&LoopCable<S>> {
        self.loops.iter().find(|c| c.id == id)
    }

    pub fn cable_index(&self, id: &str) -> Option<usize> {
        self.loops.iter().position(|c| c.id == id)
    }

    pub fn core(&self, id: &str) -> Option<&CoreSwitch> {
        self.cores.iter().find(|c| c.id == id)
    }

    pub fn breakout_box(&self, id: &str) -> Option<&BreakoutBox<S>> {
        self.boxes.iter().find(|b| b.id == id)
    }

    pub fn switch(&self, id: &str) -> Option<&EdgeSwitch<S>> {
        self.switches.iter().find(|s| s.id == id)
    }

    pub fn office(&self, id: &str) -> Option<&Office> {
        self.offices.iter().find(|o| o.id == id)
    }

    pub fn uplink(&self, id: &str) -> Option<&Uplink> {
        self.uplinks.iter().find(|u| u.id == id)
    }

    pub fn switch_model(&self, name: &str) -> Option<&SwitchModel<S>> {
        self.switch_models.iter().find(|m| m.name == name)
    }

    pub fn uplink_of_switch(&self, switch_id: &str) -> Option<&Uplink> {
        self.uplinks
            .iter()
            .find(|u| u.switch_id() == Some(switch_id))
    }

    /// All taps with their box, in box order then tap order.
    pub fn taps(&self) -> impl Iterator<Item = (&BreakoutBox<S>, &TubeTap)> {
        self.boxes
            .iter()
            .flat_map(|b| b.taps.iter().map(move |t| (b, t)))
    }

    pub fn find_tap(&self, tap: &TapRef) -> Option<(&BreakoutBox<S>, &TubeTap)> {
        self.taps().find(|(_, t)| {
            t.cable == tap.cable && t.tube == tap.tube && t.side == tap.side
        })
    }

    pub fn uplinks_on_tap<'a>(&'a self, tap: &'a TapRef) -> impl Iterator<Item = &'a Uplink> + 'a {
        self.uplinks.iter().filter(move |u| &u.tap == tap)
    }

    /// Boxes on a cable sorted by chainage.
    pub fn boxes_on_cable(&self, cable: &str) -> Vec<&BreakoutBox<S>> {
        let mut out: Vec<_> = self.boxes.iter().filter(|b| b.cable == cable).collect();
        out.sort_by(|a, b| {
            a.chainage_m
                .partial_cmp(&b.chainage_m)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.id.cmp(&b.id))
        });
        out
    }

    /// 1-based position of a box on its loop in chainage order.
    pub fn box_number(&self, box_id: &str) -> Option<(usize, usize)> {
        let bx = self.breakout_box(box_id)?;
        let loop_no = self.cable_index(&bx.cable)? + 1;
        let pos = self
            .boxes_on_cable(&bx.cable)
            .iter()
            .position(|b| b.id == box_id)?
            + 1;
        Some((loop_no, pos))
    }

    /// Panel ports: every fiber terminates at each cable end landing on the panel.
    pub fn panel_port_count(&self) -> u64 {
        self.loops
            .iter()
            .map(|c| u64::from(c.panel_ends()) * u64::from(c.total_fibers()))
            .sum()
    }

    /// Tube capacity counting each direction of a tube separately.
    pub fn equivalent_tube_capacity(cable: &LoopCable<S>) -> u32 {
        cable.panel_ends() * cable.tube_count
    }

    /// Unused `(tube, side)` slots on a cable.
    pub fn free_tube_sides(&self, cable: &str) -> Vec<(u32, Side)> {
        let Some(c) = self.cable(cable) else {
            return Vec::new();
        };
        let used: BTreeSet<(u32, Side)> = self
            .taps()
            .filter(|(_, t)| t.cable == cable)
            .map(|(_, t)| (t.tube, t.side))
            .collect();
        (1..=c.tube_count)
            .flat_map(|tube| c.sides().iter().map(move |&s| (tube, s)))
            .filter(|slot| !used.contains(slot))
            .collect()
    }

    pub fn total_fibers(&self) -> u64 {
        self.loops.iter().map(|c| u64::from(c.total_fibers())).sum()
    }

    pub fn tap_count(&self) -> usize {
        self.boxes.iter().map(|b| b.taps.len()).sum()
    }
}

//! Canonical JSON site description and its conversion to and from
//! [`FiberPlant`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::*;
use crate::estimate::{CostModel, MtbfSpec, PoeClass, PowerModel};
use crate::labels::{ColorScheme, DirectionLetters};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: &str = "1";

fn yes() -> bool {
    true
}
fn default_priority() -> u32 {
    32768
}
fn default_seq() -> u32 {
    1
}
fn default_fotag() -> ColorScheme {
    ColorScheme::Fotag
}
fn default_ar() -> DirectionLetters {
    DirectionLetters::AR
}
fn default_os1() -> FiberGrade {
    FiberGrade::Os1
}
fn default_lc() -> Connector {
    Connector::Lc
}
fn default_upc() -> Polish {
    Polish::Upc
}
fn default_mains() -> PowerSource {
    PowerSource::Mains230
}
fn default_bureau() -> Placement {
    Placement::Bureau
}
fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantDocument {
    pub schema_version: String,
    pub site: SiteDoc,
    #[serde(default)]
    pub loops: Vec<LoopDoc>,
    #[serde(default)]
    pub cores: Vec<CoreDoc>,
    #[serde(default)]
    pub boxes: Vec<BoxDoc>,
    #[serde(default)]
    pub switches: Vec<SwitchDoc>,
    #[serde(default)]
    pub offices: Vec<OfficeDoc>,
    #[serde(default)]
    pub uplinks: Vec<UplinkDoc>,
    #[serde(default)]
    pub models: ModelsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteDoc {
    pub name: String,
    #[serde(default = "default_fotag")]
    pub color_scheme: ColorScheme,
    #[serde(default = "default_ar")]
    pub direction_letters: DirectionLetters,
    #[serde(default)]
    pub allow_same_box_double_tap: bool,
    #[serde(default = "yes")]
    pub core_interconnect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<char>,
    pub length_m: f64,
    pub tube_count: u32,
    pub fibers_per_tube: u32,
    pub end_a_core: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_b_core: Option<String>,
    #[serde(default = "default_os1")]
    pub fiber_grade: FiberGrade,
    #[serde(default = "yes")]
    pub bend_insensitive: bool,
    #[serde(default = "default_lc")]
    pub connector: Connector,
    #[serde(default = "default_upc")]
    pub polish: Polish,
    #[serde(default, skip_serializing_if = "is_false")]
    pub point_to_point: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub panel_hybrid_cords: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreDoc {
    pub id: String,
    pub sfp_port_count: u32,
    #[serde(default = "default_priority")]
    pub bridge_priority: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TapDoc {
    pub tube: u32,
    pub side: Side,
    /// Spliced fibers; all fibers of the tube when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    pub id: String,
    pub cable: String,
    pub chainage_m: f64,
    #[serde(default = "default_upc")]
    pub port_polish: Polish,
    #[serde(default)]
    pub taps: Vec<TapDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoeDeviceDoc {
    pub name: String,
    pub power_w: f64,
    pub cord_m: f64,
    pub class: PoeClass,
    #[serde(default, skip_serializing_if = "is_false")]
    pub night_off: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchDoc {
    pub id: String,
    pub kind: SwitchKind,
    pub office: String,
    #[serde(rename = "box")]
    pub box_id: String,
    #[serde(default = "yes")]
    pub internal_rj45: bool,
    #[serde(default)]
    pub poe_capable: bool,
    #[serde(default = "default_mains")]
    pub power_source: PowerSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_link_peer: Option<String>,
    #[serde(default = "default_bureau")]
    pub placement: Placement,
    #[serde(default = "default_seq")]
    pub seq: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch_cord_m: Option<u32>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub hybrid_cord: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_ports: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poe_devices: Vec<PoeDeviceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poe_budget_w: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfficeDoc {
    pub id: String,
    #[serde(default)]
    pub building: String,
    #[serde(default)]
    pub floor: String,
    pub room: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetDoc {
    Switch(String),
    Outlet(String),
    Reserved(SwitchKind),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidiDoc {
    pub core_end: Polarity,
    pub switch_end: Polarity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UplinkDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub mode: UplinkMode,
    pub cable: String,
    pub tube: u32,
    pub side: Side,
    pub fibers: Vec<u32>,
    pub core: String,
    pub core_port: u32,
    pub target: TargetDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bidi: Option<BidiDoc>,
    #[serde(default = "default_upc")]
    pub transceiver_polish: Polish,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_per_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duplex_sfp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplex_sfp_pair: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub micro_switch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mini_switch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transformer_54v: Option<f64>,
    /// Keys are cord lengths in meters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub patch_cord_by_length: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub af_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bt_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bt_loss_w_per_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_copper_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eepoe_saving_per_idle_port_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transformer_consumption_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_switch_poe_budget_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub night_hours: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MtbfDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by_model: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_hours: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repair_turnaround_years: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchModelDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_draw_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtbf_hours: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelsDoc {
    #[serde(default)]
    pub cost: CostDoc,
    #[serde(default)]
    pub power: PowerDoc,
    #[serde(default)]
    pub mtbf: MtbfDoc,
    #[serde(default)]
    pub switch_models: Vec<SwitchModelDoc>,
}

pub fn parse_document(text: &str) -> Result<PlantDocument, PlantError> {
    let doc: PlantDocument = serde_json::from_str(text).map_err(|e| PlantError::Schema {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(PlantError::Schema {
            path: "schema_version".into(),
            message: format!(
                "unsupported schema version '{}', expected '{SCHEMA_VERSION}'",
                doc.schema_version
            ),
        });
    }
    Ok(doc)
}

fn num<S: Scalar>(value: f64, path: impl FnOnce() -> String) -> Result<S, PlantError> {
    S::from_document(value).ok_or_else(|| PlantError::Schema {
        path: path(),
        message: format!("number {value} not representable"),
    })
}

fn opt_num<S: Scalar>(
    value: Option<f64>,
    default: S,
    path: impl FnOnce() -> String,
) -> Result<S, PlantError> {
    match value {
        Some(v) => num(v, path),
        None => Ok(default),
    }
}

fn reference(path: String, kind: &'static str, id: &str) -> PlantError {
    PlantError::Reference {
        path,
        kind,
        id: id.to_string(),
    }
}

fn check_unique<'a>(
    section: &str,
    ids: impl Iterator<Item = &'a String>,
) -> Result<(), PlantError> {
    let mut seen = BTreeSet::new();
    for (i, id) in ids.enumerate() {
        if !seen.insert(id) {
            return Err(PlantError::Invariant {
                path: format!("{section}[{i}]"),
                message: format!("duplicate id '{id}'"),
            });
        }
    }
    Ok(())
}

fn default_symbol(index: usize) -> char {
    const SYMBOLS: &[u8] = b"123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    SYMBOLS.get(index).map(|&b| b as char).unwrap_or('0')
}

/// Builds a cross-referenced plant without checking plant-level invariants.
///
/// Schema and reference errors are reported; everything else is left to
/// [`validate_plant`].
pub fn assemble_plant<S: Scalar>(doc: &PlantDocument) -> Result<FiberPlant<S>, PlantError> {
    check_unique("loops", doc.loops.iter().map(|l| &l.id))?;
    check_unique("cores", doc.cores.iter().map(|c| &c.id))?;
    check_unique("boxes", doc.boxes.iter().map(|b| &b.id))?;
    check_unique("switches", doc.switches.iter().map(|s| &s.id))?;
    check_unique("offices", doc.offices.iter().map(|o| &o.id))?;

    let core_ids: BTreeSet<&str> = doc.cores.iter().map(|c| c.id.as_str()).collect();
    let loop_ids: BTreeSet<&str> = doc.loops.iter().map(|l| l.id.as_str()).collect();
    let box_ids: BTreeSet<&str> = doc.boxes.iter().map(|b| b.id.as_str()).collect();
    let office_ids: BTreeSet<&str> = doc.offices.iter().map(|o| o.id.as_str()).collect();
    let switch_ids: BTreeSet<&str> = doc.switches.iter().map(|s| s.id.as_str()).collect();

    let cores = doc
        .cores
        .iter()
        .map(|c| CoreSwitch {
            id: c.id.clone(),
            sfp_port_count: c.sfp_port_count,
            bridge_priority: c.bridge_priority,
        })
        .collect();

    let mut loops = Vec::with_capacity(doc.loops.len());
    for (i, l) in doc.loops.iter().enumerate() {
        let end_b = l.end_b_core.clone().unwrap_or_else(|| l.end_a_core.clone());
        for core in [&l.end_a_core, &end_b] {
            if !core_ids.contains(core.as_str()) {
                return Err(reference(format!("loops[{i}]"), "core", core));
            }
        }
        loops.push(LoopCable {
            id: l.id.clone(),
            symbol: l.symbol.unwrap_or_else(|| default_symbol(i)),
            length_m: num(l.length_m, || format!("loops[{i}].length_m"))?,
            tube_count: l.tube_count,
            fibers_per_tube: l.fibers_per_tube,
            end_a_core: l.end_a_core.clone(),
            end_b_core: end_b,
            fiber_grade: l.fiber_grade,
            bend_insensitive: l.bend_insensitive,
            connector: l.connector,
            polish: l.polish,
            point_to_point: l.point_to_point,
            panel_hybrid_cords: l.panel_hybrid_cords,
            box_positions: Vec::new(),
        });
    }

    let fibers_per_tube: HashMap<&str, u32> = doc
        .loops
        .iter()
        .map(|l| (l.id.as_str(), l.fibers_per_tube))
        .collect();
    let mut boxes = Vec::with_capacity(doc.boxes.len());
    for (i, b) in doc.boxes.iter().enumerate() {
        if !loop_ids.contains(b.cable.as_str()) {
            return Err(reference(format!("boxes[{i}]"), "cable", &b.cable));
        }
        let chainage: S = num(b.chainage_m, || format!("boxes[{i}].chainage_m"))?;
        let m = fibers_per_tube[b.cable.as_str()];
        let taps = b
            .taps
            .iter()
            .map(|t| TubeTap {
                cable: b.cable.clone(),
                tube: t.tube,
                side: t.side,
                box_id: b.id.clone(),
                spliced_fibers: match &t.fibers {
                    Some(f) => f.iter().copied().collect(),
                    None => (1..=m).collect(),
                },
            })
            .collect();
        if let Some(cable) = loops.iter_mut().find(|c| c.id == b.cable) {
            cable.box_positions.push((b.id.clone(), chainage));
        }
        boxes.push(BreakoutBox {
            id: b.id.clone(),
            cable: b.cable.clone(),
            chainage_m: chainage,
            taps,
            port_polish: b.port_polish,
        });
    }

    let mut switches = Vec::with_capacity(doc.switches.len());
    for (i, s) in doc.switches.iter().enumerate() {
        let path = || format!("switches[{i}]");
        if !box_ids.contains(s.box_id.as_str()) {
            return Err(reference(path(), "box", &s.box_id));
        }
        if !office_ids.contains(s.office.as_str()) {
            return Err(reference(path(), "office", &s.office));
        }
        if let Some(peer) = &s.cross_link_peer {
            if !switch_ids.contains(peer.as_str()) {
                return Err(reference(path(), "switch", peer));
            }
        }
        let mut poe_devices = Vec::with_capacity(s.poe_devices.len());
        for (j, d) in s.poe_devices.iter().enumerate() {
            poe_devices.push(PoeDevice {
                name: d.name.clone(),
                power_w: num(d.power_w, || format!("switches[{i}].poe_devices[{j}].power_w"))?,
                cord_m: num(d.cord_m, || format!("switches[{i}].poe_devices[{j}].cord_m"))?,
                class: d.class,
                night_off: d.night_off,
            });
        }
        let poe_budget_w = match s.poe_budget_w {
            Some(v) => Some(num(v, || format!("switches[{i}].poe_budget_w"))?),
            None => None,
        };
        switches.push(EdgeSwitch {
            id: s.id.clone(),
            kind: s.kind,
            office: s.office.clone(),
            box_id: s.box_id.clone(),
            internal_rj45: s.internal_rj45,
            poe_capable: s.poe_capable,
            power_source: s.power_source,
            cross_link_peer: s.cross_link_peer.clone(),
            placement: s.placement,
            seq: s.seq,
            model: s.model.clone(),
            patch_cord_m: s.patch_cord_m,
            hybrid_cord: s.hybrid_cord,
            active_ports: s.active_ports,
            poe_devices,
            poe_budget_w,
            extra: s.extra.clone(),
        });
    }

    let offices = doc
        .offices
        .iter()
        .map(|o| Office {
            id: o.id.clone(),
            building: o.building.clone(),
            floor: o.floor.clone(),
            room: o.room.clone(),
        })
        .collect();

    let mut uplinks = Vec::with_capacity(doc.uplinks.len());
    for (i, u) in doc.uplinks.iter().enumerate() {
        let path = || format!("uplinks[{i}]");
        if !loop_ids.contains(u.cable.as_str()) {
            return Err(reference(path(), "cable", &u.cable));
        }
        if !core_ids.contains(u.core.as_str()) {
            return Err(reference(path(), "core", &u.core));
        }
        match &u.target {
            TargetDoc::Switch(id) if !switch_ids.contains(id.as_str()) => {
                return Err(reference(path(), "switch", id));
            }
            TargetDoc::Outlet(id) if !office_ids.contains(id.as_str()) => {
                return Err(reference(path(), "office", id));
            }
            _ => {}
        }
        uplinks.push(uplink_from_doc(u, &path())?);
    }
    check_unique("uplinks", uplinks.iter().map(|u| &u.id))?;

    let models = &doc.models;
    let cd = CostModel::<S>::default();
    let mut patch_cord_by_length = BTreeMap::new();
    for (len, price) in &models.cost.patch_cord_by_length {
        let path = || format!("models.cost.patch_cord_by_length.{len}");
        let meters: u32 = len.parse().map_err(|_| PlantError::Schema {
            path: path(),
            message: "cord length key must be an integer number of meters".into(),
        })?;
        patch_cord_by_length.insert(meters, num(*price, path)?);
    }
    let cost_model = CostModel {
        fiber_per_m: opt_num(models.cost.fiber_per_m, cd.fiber_per_m, || "models.cost.fiber_per_m".into())?,
        duplex_sfp: opt_num(models.cost.duplex_sfp, cd.duplex_sfp, || "models.cost.duplex_sfp".into())?,
        simplex_sfp_pair: opt_num(models.cost.simplex_sfp_pair, cd.simplex_sfp_pair, || {
            "models.cost.simplex_sfp_pair".into()
        })?,
        micro_switch: opt_num(models.cost.micro_switch, cd.micro_switch, || "models.cost.micro_switch".into())?,
        mini_switch: opt_num(models.cost.mini_switch, cd.mini_switch, || "models.cost.mini_switch".into())?,
        transformer_54v: opt_num(models.cost.transformer_54v, cd.transformer_54v, || {
            "models.cost.transformer_54v".into()
        })?,
        patch_cord_by_length,
    };

    let pd = PowerModel::<S>::default();
    let p = &models.power;
    macro_rules! pw {
        ($field:ident) => {
            opt_num(p.$field, pd.$field, || concat!("models.power.", stringify!($field)).into())?
        };
    }
    let power_model = PowerModel {
        af_w: pw!(af_w),
        at_w: pw!(at_w),
        bt_w: pw!(bt_w),
        bt_loss_w_per_m: pw!(bt_loss_w_per_m),
        quality_multiplier: pw!(quality_multiplier),
        max_copper_m: pw!(max_copper_m),
        eepoe_saving_per_idle_port_w: pw!(eepoe_saving_per_idle_port_w),
        transformer_consumption_factor: pw!(transformer_consumption_factor),
        default_switch_poe_budget_w: pw!(default_switch_poe_budget_w),
        night_hours: pw!(night_hours),
    };

    let md = MtbfSpec::<S>::default();
    let mtbf = MtbfSpec {
        by_model: match &models.mtbf.by_model {
            Some(map) => {
                let mut out = BTreeMap::new();
                for (k, v) in map {
                    out.insert(k.clone(), num(*v, || format!("models.mtbf.by_model.{k}"))?);
                }
                out
            }
            None => md.by_model,
        },
        default_hours: opt_num(models.mtbf.default_hours, md.default_hours, || {
            "models.mtbf.default_hours".into()
        })?,
        repair_turnaround_years: opt_num(
            models.mtbf.repair_turnaround_years,
            md.repair_turnaround_years,
            || "models.mtbf.repair_turnaround_years".into(),
        )?,
    };

    let mut switch_models = Vec::with_capacity(models.switch_models.len());
    for (i, m) in models.switch_models.iter().enumerate() {
        switch_models.push(SwitchModel {
            name: m.name.clone(),
            base_draw_w: match m.base_draw_w {
                Some(v) => Some(num(v, || format!("models.switch_models[{i}].base_draw_w"))?),
                None => None,
            },
            mtbf_hours: match m.mtbf_hours {
                Some(v) => Some(num(v, || format!("models.switch_models[{i}].mtbf_hours"))?),
                None => None,
            },
        });
    }

    Ok(FiberPlant {
        site_name: doc.site.name.clone(),
        loops,
        cores,
        boxes,
        switches,
        offices,
        uplinks,
        cost_model,
        power_model,
        mtbf,
        switch_models,
        color_scheme: doc.site.color_scheme,
        direction_letters: doc.site.direction_letters,
        allow_same_box_double_tap: doc.site.allow_same_box_double_tap,
        core_interconnect: doc.site.core_interconnect,
    })
}

/// Loads a plant and rejects it on the first error-severity violation.
pub fn load_plant<S: Scalar>(doc: &PlantDocument) -> Result<FiberPlant<S>, PlantError> {
    let plant = assemble_plant(doc)?;
    if let Some(v) = validate_plant(&plant)
        .into_iter()
        .find(|v| v.severity == Severity::Error)
    {
        return Err(PlantError::Invariant {
            path: v.path,
            message: v.message,
        });
    }
    Ok(plant)
}

pub fn load_plant_str<S: Scalar>(text: &str) -> Result<FiberPlant<S>, PlantError> {
    load_plant(&parse_document(text)?)
}

/// Converts a plant back to its canonical document, writing every field.
pub fn plant_to_document<S: Scalar>(plant: &FiberPlant<S>) -> PlantDocument {
    let f = |v: S| v.to_document();
    PlantDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        site: SiteDoc {
            name: plant.site_name.clone(),
            color_scheme: plant.color_scheme,
            direction_letters: plant.direction_letters,
            allow_same_box_double_tap: plant.allow_same_box_double_tap,
            core_interconnect: plant.core_interconnect,
        },
        loops: plant
            .loops
            .iter()
            .map(|l| LoopDoc {
                id: l.id.clone(),
                symbol: Some(l.symbol),
                length_m: f(l.length_m),
                tube_count: l.tube_count,
                fibers_per_tube: l.fibers_per_tube,
                end_a_core: l.end_a_core.clone(),
                end_b_core: Some(l.end_b_core.clone()),
                fiber_grade: l.fiber_grade,
                bend_insensitive: l.bend_insensitive,
                connector: l.connector,
                polish: l.polish,
                point_to_point: l.point_to_point,
                panel_hybrid_cords: l.panel_hybrid_cords,
            })
            .collect(),
        cores: plant
            .cores
            .iter()
            .map(|c| CoreDoc {
                id: c.id.clone(),
                sfp_port_count: c.sfp_port_count,
                bridge_priority: c.bridge_priority,
            })
            .collect(),
        boxes: plant
            .boxes
            .iter()
            .map(|b| BoxDoc {
                id: b.id.clone(),
                cable: b.cable.clone(),
                chainage_m: f(b.chainage_m),
                port_polish: b.port_polish,
                taps: b
                    .taps
                    .iter()
                    .map(|t| TapDoc {
                        tube: t.tube,
                        side: t.side,
                        fibers: Some(t.spliced_fibers.iter().copied().collect()),
                    })
                    .collect(),
            })
            .collect(),
        switches: plant
            .switches
            .iter()
            .map(|s| SwitchDoc {
                id: s.id.clone(),
                kind: s.kind,
                office: s.office.clone(),
                box_id: s.box_id.clone(),
                internal_rj45: s.internal_rj45,
                poe_capable: s.poe_capable,
                power_source: s.power_source,
                cross_link_peer: s.cross_link_peer.clone(),
                placement: s.placement,
                seq: s.seq,
                model: s.model.clone(),
                patch_cord_m: s.patch_cord_m,
                hybrid_cord: s.hybrid_cord,
                active_ports: s.active_ports,
                poe_devices: s
                    .poe_devices
                    .iter()
                    .map(|d| PoeDeviceDoc {
                        name: d.name.clone(),
                        power_w: f(d.power_w),
                        cord_m: f(d.cord_m),
                        class: d.class,
                        night_off: d.night_off,
                    })
                    .collect(),
                poe_budget_w: s.poe_budget_w.map(f),
                extra: s.extra.clone(),
            })
            .collect(),
        offices: plant
            .offices
            .iter()
            .map(|o| OfficeDoc {
                id: o.id.clone(),
                building: o.building.clone(),
                floor: o.floor.clone(),
                room: o.room.clone(),
            })
            .collect(),
        uplinks: plant
            .uplinks
            .iter()
            .map(uplink_to_doc)
            .collect(),
        models: ModelsDoc {
            cost: CostDoc {
                fiber_per_m: Some(f(plant.cost_model.fiber_per_m)),
                duplex_sfp: Some(f(plant.cost_model.duplex_sfp)),
                simplex_sfp_pair: Some(f(plant.cost_model.simplex_sfp_pair)),
                micro_switch: Some(f(plant.cost_model.micro_switch)),
                mini_switch: Some(f(plant.cost_model.mini_switch)),
                transformer_54v: Some(f(plant.cost_model.transformer_54v)),
                patch_cord_by_length: plant
                    .cost_model
                    .patch_cord_by_length
                    .iter()
                    .map(|(k, v)| (k.to_string(), f(*v)))
                    .collect(),
            },
            power: {
                let p = &plant.power_model;
                PowerDoc {
                    af_w: Some(f(p.af_w)),
                    at_w: Some(f(p.at_w)),
                    bt_w: Some(f(p.bt_w)),
                    bt_loss_w_per_m: Some(f(p.bt_loss_w_per_m)),
                    quality_multiplier: Some(f(p.quality_multiplier)),
                    max_copper_m: Some(f(p.max_copper_m)),
                    eepoe_saving_per_idle_port_w: Some(f(p.eepoe_saving_per_idle_port_w)),
                    transformer_consumption_factor: Some(f(p.transformer_consumption_factor)),
                    default_switch_poe_budget_w: Some(f(p.default_switch_poe_budget_w)),
                    night_hours: Some(f(p.night_hours)),
                }
            },
            mtbf: MtbfDoc {
                by_model: Some(
                    plant
                        .mtbf
                        .by_model
                        .iter()
                        .map(|(k, v)| (k.clone(), f(*v)))
                        .collect(),
                ),
                default_hours: Some(f(plant.mtbf.default_hours)),
                repair_turnaround_years: Some(f(plant.mtbf.repair_turnaround_years)),
            },
            switch_models: plant
                .switch_models
                .iter()
                .map(|m| SwitchModelDoc {
                    name: m.name.clone(),
                    base_draw_w: m.base_draw_w.map(f),
                    mtbf_hours: m.mtbf_hours.map(f),
                })
                .collect(),
        },
    }
}

pub fn plant_to_json<S: Scalar>(plant: &FiberPlant<S>) -> String {
    let mut text = serde_json::to_string_pretty(&plant_to_document(plant))
        .expect("plant document serializes");
    text.push('\n');
    text
}

pub(crate) fn uplink_to_doc(u: &Uplink) -> UplinkDoc {
    UplinkDoc {
        id: Some(u.id.clone()),
        mode: u.mode,
        cable: u.tap.cable.clone(),
        tube: u.tap.tube,
        side: u.tap.side,
        fibers: u.fibers.clone(),
        core: u.core_port.core.clone(),
        core_port: u.core_port.port,
        target: match &u.target {
            UplinkTarget::Switch(id) => TargetDoc::Switch(id.clone()),
            UplinkTarget::Outlet(id) => TargetDoc::Outlet(id.clone()),
            UplinkTarget::Reserved(kind) => TargetDoc::Reserved(*kind),
        },
        bidi: u.bidi.map(|b| BidiDoc {
            core_end: b.core_end,
            switch_end: b.switch_end,
        }),
        transceiver_polish: u.transceiver_polish,
    }
}

/// Converts without reference checks; callers check against a plant.
pub(crate) fn uplink_from_doc(u: &UplinkDoc, path: &str) -> Result<Uplink, PlantError> {
    let Some(&first) = u.fibers.first() else {
        return Err(PlantError::Schema {
            path: format!("{path}.fibers"),
            message: "at least one fiber required".into(),
        });
    };
    let tap = TapRef {
        cable: u.cable.clone(),
        tube: u.tube,
        side: u.side,
    };
    Ok(Uplink {
        id: u.id.clone().unwrap_or_else(|| Uplink::uplink_id(&tap, first)),
        mode: u.mode,
        tap,
        fibers: u.fibers.clone(),
        transceiver_polish: u.transceiver_polish,
        bidi: u.bidi.as_ref().map(|b| BidiPolarity {
            core_end: b.core_end,
            switch_end: b.switch_end,
        }),
        core_port: CorePort {
            core: u.core.clone(),
            port: u.core_port,
        },
        target: match &u.target {
            TargetDoc::Switch(id) => UplinkTarget::Switch(id.clone()),
            TargetDoc::Outlet(id) => UplinkTarget::Outlet(id.clone()),
            TargetDoc::Reserved(kind) => UplinkTarget::Reserved(*kind),
        },
    })
}

//! Label sheets for the central panel, breakout boxes and switches.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{box_name, switch_dns_name, ColorScheme, Direction, FiberRef, PortSuffix};
use crate::plant::{FiberPlant, Side, TapRef, Uplink, UplinkMode, UplinkTarget};
use crate::scalar::Scalar;

/// Connection text for a panel port with nothing behind it.
pub const RESERVE_MARK: &str = "réserve";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PanelRecord {
    pub cable: String,
    pub end: char,
    pub tube: u32,
    pub tube_color: String,
    pub fiber: u32,
    pub fiber_color: String,
    pub label: String,
    /// Box port label, or [`RESERVE_MARK`].
    pub connection: String,
    pub uplink: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoxRecord {
    #[serde(rename = "box")]
    pub box_id: String,
    pub box_name: String,
    pub cable: String,
    pub tube: u32,
    pub tube_color: String,
    pub side: char,
    /// Side letter and tube color, e.g. `A-Bleu`.
    pub tap: String,
    pub fiber: u32,
    pub fiber_color: String,
    pub port: String,
    pub uplink: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwitchRecord {
    pub switch: String,
    pub kind: String,
    pub dns_name: String,
    pub office: String,
    pub location: String,
    pub box_port: String,
    pub uplink: String,
    pub core_port: String,
    /// Free-form datacentre fields as `key=value` joined by `;`.
    pub extra: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabelSheets {
    pub panel: Vec<PanelRecord>,
    pub boxes: Vec<BoxRecord>,
    pub switches: Vec<SwitchRecord>,
}

impl LabelSheets {
    pub fn is_empty(&self) -> bool {
        self.panel.is_empty() && self.boxes.is_empty() && self.switches.is_empty()
    }

    /// Combined document, pretty-printed with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("label sheets always serialize");
        text.push('\n');
        text
    }

    /// One delimiter-separated sheet per record type: `(name, body)`.
    pub fn to_csv(&self) -> Result<Vec<(&'static str, String)>, csv::Error> {
        Ok(vec![
            ("panel", write_csv(&self.panel)?),
            ("boxes", write_csv(&self.boxes)?),
            ("switches", write_csv(&self.switches)?),
        ])
    }
}

fn write_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of strings is utf-8"))
}

fn color(scheme: ColorScheme, index: u32) -> String {
    scheme
        .color_of(index)
        .map(str::to_string)
        .unwrap_or_else(|_| index.to_string())
}

fn target_text(target: &UplinkTarget) -> String {
    match target {
        UplinkTarget::Switch(id) => id.clone(),
        UplinkTarget::Outlet(office) => format!("outlet:{office}"),
        UplinkTarget::Reserved(kind) => format!("reserved:{}", kind_text(*kind)),
    }
}

fn kind_text(kind: crate::plant::SwitchKind) -> &'static str {
    match kind {
        crate::plant::SwitchKind::Micro4 => "micro4",
        crate::plant::SwitchKind::Mini8 => "mini8",
    }
}

/// Box-level port names for every spliced fiber of every tap of every box.
///
/// Pairs are numbered across the box's taps in (tube, side) order, each tap
/// contributing `ceil(M / 2)` pairs.
struct PortNames {
    by_fiber: BTreeMap<(TapRef, u32), String>,
}

impl PortNames {
    fn new<S: Scalar>(plant: &FiberPlant<S>, uplink_of: &BTreeMap<(TapRef, u32), &Uplink>) -> Self {
        let mut by_fiber = BTreeMap::new();
        for bx in &plant.boxes {
            let Some((loop_no, box_no)) = plant.box_number(&bx.id) else {
                continue;
            };
            let Some(cable) = plant.cable(&bx.cable) else {
                continue;
            };
            let name = box_name(loop_no, box_no);
            let pairs_per_tap = cable.fibers_per_tube.div_ceil(2);
            let mut taps: Vec<_> = bx.taps.iter().collect();
            taps.sort_by_key(|t| (t.tube, t.side));
            for (k, tap) in taps.iter().enumerate() {
                let tap_ref = tap.tap_ref();
                for &f in &tap.spliced_fibers {
                    let pair = k as u32 * pairs_per_tap + f.div_ceil(2);
                    let mode = uplink_of
                        .get(&(tap_ref.clone(), f))
                        .map_or(UplinkMode::Simplex, |u| u.mode);
                    let suffix = PortSuffix::for_uplink(mode, f).letter();
                    by_fiber.insert((tap_ref.clone(), f), format!("{name}.{pair}{suffix}"));
                }
            }
        }
        PortNames { by_fiber }
    }
}

fn tap_key(cable: &str, tube: u32, side: Side) -> TapRef {
    TapRef {
        cable: cable.to_string(),
        tube,
        side,
    }
}

/// Builds every label sheet of the plant in a fixed order: panel by cable,
/// end, tube and fiber; boxes by cable and chainage; switches by id.
pub fn label_sheets<S: Scalar>(plant: &FiberPlant<S>) -> LabelSheets {
    let scheme = plant.color_scheme;
    let mut uplink_of: BTreeMap<(TapRef, u32), &Uplink> = BTreeMap::new();
    for u in &plant.uplinks {
        for &f in &u.fibers {
            uplink_of.insert((u.tap.clone(), f), u);
        }
    }
    let ports = PortNames::new(plant, &uplink_of);
    let mut tapped = BTreeMap::new();
    for (_, t) in plant.taps() {
        tapped.insert(t.tap_ref(), t);
    }

    let mut panel = Vec::new();
    for cable in &plant.loops {
        for &end in cable.sides() {
            let direction = match end {
                Side::TowardA => Direction::Outbound,
                Side::TowardB => Direction::Return,
            };
            for tube in 1..=cable.tube_count {
                let key = tap_key(&cable.id, tube, end);
                let tap = tapped.get(&key);
                for fiber in 1..=cable.fibers_per_tube {
                    let label = u8::try_from(tube - 1)
                        .ok()
                        .zip(u8::try_from(fiber - 1).ok())
                        .and_then(|(t, f)| FiberRef::new(direction, cable.symbol, t, f).ok())
                        .map(|r| r.encode_with(plant.direction_letters))
                        .unwrap_or_default();
                    let spliced = tap.is_some_and(|t| t.spliced_fibers.contains(&fiber));
                    let fkey = (key.clone(), fiber);
                    let connection = if spliced {
                        ports.by_fiber.get(&fkey).cloned()
                    } else {
                        None
                    };
                    let uplink = uplink_of.get(&fkey);
                    panel.push(PanelRecord {
                        cable: cable.id.clone(),
                        end: end.letter(),
                        tube,
                        tube_color: color(scheme, tube),
                        fiber,
                        fiber_color: color(scheme, fiber),
                        label,
                        connection: connection.unwrap_or_else(|| RESERVE_MARK.to_string()),
                        uplink: uplink.map(|u| u.id.clone()).unwrap_or_default(),
                        target: uplink.map(|u| target_text(&u.target)).unwrap_or_default(),
                    });
                }
            }
        }
    }

    let mut boxes = Vec::new();
    for cable in &plant.loops {
        for bx in plant.boxes_on_cable(&cable.id) {
            let name = plant
                .box_number(&bx.id)
                .map(|(l, b)| box_name(l, b))
                .unwrap_or_default();
            let mut taps: Vec<_> = bx.taps.iter().collect();
            taps.sort_by_key(|t| (t.tube, t.side));
            for tap in taps {
                let tube_color = color(scheme, tap.tube);
                let tap_ref = tap.tap_ref();
                for &fiber in &tap.spliced_fibers {
                    let fkey = (tap_ref.clone(), fiber);
                    let uplink = uplink_of.get(&fkey);
                    boxes.push(BoxRecord {
                        box_id: bx.id.clone(),
                        box_name: name.clone(),
                        cable: cable.id.clone(),
                        tube: tap.tube,
                        tube_color: tube_color.clone(),
                        side: tap.side.letter(),
                        tap: format!("{}-{}", tap.side.letter(), tube_color),
                        fiber,
                        fiber_color: color(scheme, fiber),
                        port: ports.by_fiber.get(&fkey).cloned().unwrap_or_default(),
                        uplink: uplink.map(|u| u.id.clone()).unwrap_or_default(),
                        target: uplink.map(|u| target_text(&u.target)).unwrap_or_default(),
                    });
                }
            }
        }
    }

    let mut switches: Vec<SwitchRecord> = plant
        .switches
        .iter()
        .map(|s| {
            let office = plant.office(&s.office);
            let uplink = plant.uplink_of_switch(&s.id);
            SwitchRecord {
                switch: s.id.clone(),
                kind: kind_text(s.kind).to_string(),
                dns_name: office
                    .map(|o| switch_dns_name(&plant.site_name, &o.room, s.placement, s.seq))
                    .unwrap_or_default(),
                office: s.office.clone(),
                location: office.map(|o| o.location()).unwrap_or_default(),
                box_port: uplink
                    .and_then(|u| ports.by_fiber.get(&(u.tap.clone(), u.fibers[0])).cloned())
                    .unwrap_or_default(),
                uplink: uplink.map(|u| u.id.clone()).unwrap_or_default(),
                core_port: uplink
                    .map(|u| format!("{}:{}", u.core_port.core, u.core_port.port))
                    .unwrap_or_default(),
                extra: s
                    .extra
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            }
        })
        .collect();
    switches.sort_by(|a, b| a.switch.cmp(&b.switch));

    LabelSheets {
        panel,
        boxes,
        switches,
    }
}

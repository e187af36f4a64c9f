use std::fmt;

use serde::{Deserialize, Serialize};

use super::graph::{EdgeKind, LogicalGraph};
use super::FailsimError;
use crate::plant::{Id, PlantError, SCHEMA_VERSION};
use crate::scalar::{Fmt, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkEnd {
    Core,
    Switch,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureEvent<S> {
    CableCut { cable: Id, chainage_m: S },
    TransceiverFail { uplink: Id, end: LinkEnd },
    CoreFail { core: Id },
    BoxFail { box_id: Id },
    SwitchFail { switch: Id },
}

impl<S: Scalar> fmt::Display for FailureEvent<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureEvent::CableCut { cable, chainage_m } => {
                write!(f, "cable_cut {cable}@{}", Fmt(*chainage_m))
            }
            FailureEvent::TransceiverFail { uplink, end } => {
                let end = match end {
                    LinkEnd::Core => "core",
                    LinkEnd::Switch => "switch",
                };
                write!(f, "transceiver_fail {uplink}/{end}")
            }
            FailureEvent::CoreFail { core } => write!(f, "core_fail {core}"),
            FailureEvent::BoxFail { box_id } => write!(f, "box_fail {box_id}"),
            FailureEvent::SwitchFail { switch } => write!(f, "switch_fail {switch}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureScenario<S> {
    pub events: Vec<FailureEvent<S>>,
}

impl<S: Scalar> FailureScenario<S> {
    pub fn empty() -> Self {
        FailureScenario { events: Vec::new() }
    }

    pub fn single(event: FailureEvent<S>) -> Self {
        FailureScenario { events: vec![event] }
    }
}

/// Removes whatever the scenario breaks. Events apply in order; failing an
/// element twice is harmless, naming an unknown one is an error.
pub fn apply_scenario<S: Scalar>(
    graph: &LogicalGraph<S>,
    scenario: &FailureScenario<S>,
) -> Result<LogicalGraph<S>, FailsimError> {
    let mut g = graph.clone();
    let unknown = |kind: &'static str, id: &str| FailsimError::UnknownElement {
        kind,
        id: id.to_string(),
    };
    for ev in &scenario.events {
        match ev {
            FailureEvent::CableCut { cable, chainage_m } => {
                let length = *graph.cables.get(cable).ok_or_else(|| unknown("cable", cable))?;
                if *chainage_m < S::zero() || *chainage_m > length {
                    return Err(FailsimError::Chainage {
                        cable: cable.clone(),
                        chainage_m: chainage_m.to_document(),
                        length_m: length.to_document(),
                    });
                }
                g.edges.retain(|e| match &e.kind {
                    EdgeKind::Fiber {
                        cable: c, interval, ..
                    } => !(c == cable && interval.contains(*chainage_m)),
                    _ => true,
                });
            }
            FailureEvent::TransceiverFail { uplink, .. } => {
                let known = graph.edges.iter().any(|e| {
                    matches!(&e.kind, EdgeKind::Fiber { uplink: u, .. } if u == uplink)
                });
                if !known {
                    return Err(unknown("uplink", uplink));
                }
                g.edges.retain(|e| {
                    !matches!(&e.kind, EdgeKind::Fiber { uplink: u, .. } if u == uplink)
                });
            }
            FailureEvent::CoreFail { core } => {
                if !matches!(graph.node(core), Some(n) if n.kind == super::NodeKind::Core) {
                    return Err(unknown("core", core));
                }
                g.fail_node(core);
            }
            FailureEvent::SwitchFail { switch } => {
                if !matches!(graph.node(switch), Some(n) if n.kind == super::NodeKind::Switch) {
                    return Err(unknown("switch", switch));
                }
                g.fail_node(switch);
            }
            FailureEvent::BoxFail { box_id } => {
                if !graph.boxes.contains(box_id) {
                    return Err(unknown("box", box_id));
                }
                g.edges.retain(|e| {
                    !matches!(&e.kind, EdgeKind::Fiber { box_id: b, .. } if b == box_id)
                });
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum EventDoc {
    CableCut { cable: Id, chainage_m: f64 },
    TransceiverFail { uplink: Id, end: LinkEnd },
    CoreFail { core: Id },
    BoxFail {
        #[serde(rename = "box")]
        box_id: Id,
    },
    SwitchFail { switch: Id },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    schema_version: String,
    #[serde(default)]
    events: Vec<EventDoc>,
}

pub fn scenario_from_json<S: Scalar>(text: &str) -> Result<FailureScenario<S>, PlantError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| PlantError::Schema {
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
    let mut events = Vec::with_capacity(doc.events.len());
    for (i, ev) in doc.events.into_iter().enumerate() {
        events.push(match ev {
            EventDoc::CableCut { cable, chainage_m } => FailureEvent::CableCut {
                cable,
                chainage_m: S::from_document(chainage_m).ok_or_else(|| PlantError::Schema {
                    path: format!("events[{i}].chainage_m"),
                    message: format!("{chainage_m} is not representable"),
                })?,
            },
            EventDoc::TransceiverFail { uplink, end } => FailureEvent::TransceiverFail { uplink, end },
            EventDoc::CoreFail { core } => FailureEvent::CoreFail { core },
            EventDoc::BoxFail { box_id } => FailureEvent::BoxFail { box_id },
            EventDoc::SwitchFail { switch } => FailureEvent::SwitchFail { switch },
        });
    }
    Ok(FailureScenario { events })
}

pub fn scenario_to_json<S: Scalar>(scenario: &FailureScenario<S>) -> String {
    let doc = ScenarioDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        events: scenario
            .events
            .iter()
            .map(|ev| match ev {
                FailureEvent::CableCut { cable, chainage_m } => EventDoc::CableCut {
                    cable: cable.clone(),
                    chainage_m: chainage_m.to_document(),
                },
                FailureEvent::TransceiverFail { uplink, end } => EventDoc::TransceiverFail {
                    uplink: uplink.clone(),
                    end: *end,
                },
                FailureEvent::CoreFail { core } => EventDoc::CoreFail { core: core.clone() },
                FailureEvent::BoxFail { box_id } => EventDoc::BoxFail {
                    box_id: box_id.clone(),
                },
                FailureEvent::SwitchFail { switch } => EventDoc::SwitchFail {
                    switch: switch.clone(),
                },
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("scenario serializes");
    text.push('\n');
    text
}

//! Demand and plan documents.

use serde::{Deserialize, Serialize};

use super::{AllocationPlan, BoxDemand, CableReserve, DemandSpec, UplinkRequest, DEFAULT_RESERVE_TARGET};
use crate::plant::{
    uplink_from_doc, uplink_to_doc, FiberPlant, Id, PlantError, Side, SwitchKind, TubeTap,
    UplinkDoc, UplinkMode, SCHEMA_VERSION,
};
use crate::scalar::Scalar;

fn one() -> u32 {
    1
}

fn default_target() -> f64 {
    DEFAULT_RESERVE_TARGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestDoc {
    pub mode: UplinkMode,
    pub kind: SwitchKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch: Option<Id>,
    #[serde(default = "one")]
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDemandDoc {
    #[serde(rename = "box")]
    pub box_id: Id,
    pub uplinks: Vec<RequestDoc>,
}

/// Uplinks to convert to simplex: every duplex uplink, or a list of ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Ids(Vec<Id>),
}

impl Selection {
    /// Uplink ids selected in `plant`, in plant order for [`Selection::All`].
    pub fn resolve<S: Scalar>(&self, plant: &FiberPlant<S>) -> Vec<Id> {
        match self {
            Selection::All => plant
                .uplinks
                .iter()
                .filter(|u| u.mode == UplinkMode::Duplex)
                .map(|u| u.id.clone())
                .collect(),
            Selection::Ids(ids) => ids.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum SelectionDoc {
    Keyword(String),
    Ids(Vec<Id>),
}

impl Serialize for Selection {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        match self {
            Selection::All => SelectionDoc::Keyword("all".into()).serialize(s),
            Selection::Ids(ids) => SelectionDoc::Ids(ids.clone()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match SelectionDoc::deserialize(d)? {
            SelectionDoc::Keyword(k) if k == "all" => Ok(Selection::All),
            SelectionDoc::Keyword(k) => Err(serde::de::Error::custom(format!(
                "expected \"all\" or a list of uplink ids, found \"{k}\""
            ))),
            SelectionDoc::Ids(ids) => Ok(Selection::Ids(ids)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandDocument {
    pub schema_version: String,
    #[serde(default)]
    pub demands: Vec<BoxDemandDoc>,
    #[serde(default = "default_target")]
    pub reserve_target: f64,
    #[serde(default)]
    pub strict_reserve: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convert_to_simplex: Option<Selection>,
}

fn schema_error(e: serde_json::Error) -> PlantError {
    PlantError::Schema {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

fn check_version(version: &str) -> Result<(), PlantError> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(PlantError::Schema {
            path: "schema_version".into(),
            message: format!("unsupported schema version '{version}', expected '{SCHEMA_VERSION}'"),
        })
    }
}

impl DemandDocument {
    pub fn to_spec<S: Scalar>(&self) -> Result<DemandSpec<S>, PlantError> {
        let mut boxes = Vec::with_capacity(self.demands.len());
        for (i, d) in self.demands.iter().enumerate() {
            let mut requests = Vec::new();
            for (j, r) in d.uplinks.iter().enumerate() {
                if r.switch.is_some() && r.count != 1 {
                    return Err(PlantError::Schema {
                        path: format!("demands[{i}].uplinks[{j}].count"),
                        message: "a request naming a switch must have count 1".into(),
                    });
                }
                for _ in 0..r.count {
                    requests.push(UplinkRequest {
                        mode: r.mode,
                        kind: r.kind,
                        switch: r.switch.clone(),
                    });
                }
            }
            boxes.push(BoxDemand {
                box_id: d.box_id.clone(),
                requests,
            });
        }
        let reserve_target = S::from_document(self.reserve_target).ok_or_else(|| PlantError::Schema {
            path: "reserve_target".into(),
            message: format!("{} is not representable", self.reserve_target),
        })?;
        Ok(DemandSpec {
            boxes,
            reserve_target,
            strict_reserve: self.strict_reserve,
        })
    }
}

/// Parses a demand document into a spec and an optional simplex conversion.
pub fn demand_from_json<S: Scalar>(
    text: &str,
) -> Result<(DemandSpec<S>, Option<Selection>), PlantError> {
    let doc: DemandDocument = serde_json::from_str(text).map_err(schema_error)?;
    check_version(&doc.schema_version)?;
    Ok((doc.to_spec()?, doc.convert_to_simplex.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanTapDoc {
    #[serde(rename = "box")]
    pub box_id: Id,
    pub cable: Id,
    pub tube: u32,
    pub side: Side,
    pub fibers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReserveDoc {
    pub cable: Id,
    pub free_tube_sides: usize,
    pub total_tube_sides: usize,
    pub tube_side_reserve: f64,
    pub spliced_fibers: usize,
    pub free_spliced_fibers: usize,
    pub fiber_reserve: f64,
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    pub schema_version: String,
    pub taps: Vec<PlanTapDoc>,
    pub uplinks: Vec<UplinkDoc>,
    #[serde(default)]
    pub removed_uplinks: Vec<Id>,
    #[serde(default)]
    pub reserve: Vec<ReserveDoc>,
}

impl PlanDocument {
    pub fn from_plan<S: Scalar>(plan: &AllocationPlan<S>) -> Self {
        PlanDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            taps: plan
                .taps
                .iter()
                .map(|t| PlanTapDoc {
                    box_id: t.box_id.clone(),
                    cable: t.cable.clone(),
                    tube: t.tube,
                    side: t.side,
                    fibers: t.spliced_fibers.iter().copied().collect(),
                })
                .collect(),
            uplinks: plan.uplinks.iter().map(uplink_to_doc).collect(),
            removed_uplinks: plan.removed_uplinks.clone(),
            reserve: plan
                .reserve
                .iter()
                .map(|r| ReserveDoc {
                    cable: r.cable.clone(),
                    free_tube_sides: r.free_tube_sides,
                    total_tube_sides: r.total_tube_sides,
                    tube_side_reserve: r.tube_side_reserve.to_document(),
                    spliced_fibers: r.spliced_fibers,
                    free_spliced_fibers: r.free_spliced_fibers,
                    fiber_reserve: r.fiber_reserve.to_document(),
                    warning: r.warning,
                })
                .collect(),
        }
    }

    pub fn to_plan<S: Scalar>(&self) -> Result<AllocationPlan<S>, PlantError> {
        let uplinks = self
            .uplinks
            .iter()
            .enumerate()
            .map(|(i, u)| uplink_from_doc(u, &format!("uplinks[{i}]")))
            .collect::<Result<_, _>>()?;
        let mut reserve = Vec::with_capacity(self.reserve.len());
        for (i, r) in self.reserve.iter().enumerate() {
            let conv = |v: f64, field: &str| {
                S::from_document(v).ok_or_else(|| PlantError::Schema {
                    path: format!("reserve[{i}].{field}"),
                    message: format!("{v} is not representable"),
                })
            };
            reserve.push(CableReserve {
                cable: r.cable.clone(),
                free_tube_sides: r.free_tube_sides,
                total_tube_sides: r.total_tube_sides,
                tube_side_reserve: conv(r.tube_side_reserve, "tube_side_reserve")?,
                spliced_fibers: r.spliced_fibers,
                free_spliced_fibers: r.free_spliced_fibers,
                fiber_reserve: conv(r.fiber_reserve, "fiber_reserve")?,
                warning: r.warning,
            });
        }
        Ok(AllocationPlan {
            taps: self
                .taps
                .iter()
                .map(|t| TubeTap {
                    cable: t.cable.clone(),
                    tube: t.tube,
                    side: t.side,
                    box_id: t.box_id.clone(),
                    spliced_fibers: t.fibers.iter().copied().collect(),
                })
                .collect(),
            uplinks,
            removed_uplinks: self.removed_uplinks.clone(),
            reserve,
        })
    }
}

pub fn plan_to_json<S: Scalar>(plan: &AllocationPlan<S>) -> String {
    let mut text = serde_json::to_string_pretty(&PlanDocument::from_plan(plan))
        .expect("plan documents always serialize");
    text.push('\n');
    text
}

pub fn plan_from_json<S: Scalar>(text: &str) -> Result<AllocationPlan<S>, PlantError> {
    let doc: PlanDocument = serde_json::from_str(text).map_err(schema_error)?;
    check_version(&doc.schema_version)?;
    doc.to_plan()
}

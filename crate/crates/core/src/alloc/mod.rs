//! Tube tap and fiber allocation on loop cables.
//!
//! A tube can be cut once toward each end of the loop. A tap toward A keeps
//! the segment `[0, p)` alive, a tap toward B keeps `(p, L]`, so the two taps
//! of one tube must satisfy `p_A <= p_B`. The planner places new taps with
//! the fewest tubes possible, lowest tube index first, and hands out fibers
//! and core SFP ports in ascending order.

mod document;
mod planner;

use std::collections::BTreeSet;

use crate::plant::{FiberPlant, Id, PlantError, SwitchKind, UplinkMode, UplinkTarget};
use crate::scalar::Scalar;

pub use document::{
    demand_from_json, plan_from_json, plan_to_json, DemandDocument, PlanDocument, Selection,
};
pub use planner::{allocate, assign_uplink, convert_duplex_to_simplex};

pub const RESERVE_WARNING_FLOOR: f64 = 0.20;
pub const DEFAULT_RESERVE_TARGET: f64 = 0.25;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AllocError {
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("reserve error: cable '{cable}' would keep {achieved:.3} of its tube sides, target {target:.3}")]
    Reserve {
        cable: Id,
        achieved: f64,
        target: f64,
    },
    #[error("polarity error: {0}")]
    Polarity(String),
    #[error("mode error: uplink '{0}' is already simplex")]
    Mode(Id),
    #[error("unknown {kind} '{id}'")]
    Unknown { kind: &'static str, id: Id },
    #[error("invalid demand: {0}")]
    Demand(String),
    #[error(transparent)]
    Plant(#[from] PlantError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UplinkRequest {
    pub mode: UplinkMode,
    pub kind: SwitchKind,
    /// Existing switch at the box to connect; otherwise the port is reserved.
    pub switch: Option<Id>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxDemand {
    pub box_id: Id,
    pub requests: Vec<UplinkRequest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandSpec<S> {
    pub boxes: Vec<BoxDemand>,
    pub reserve_target: S,
    pub strict_reserve: bool,
}

impl<S: Scalar> DemandSpec<S> {
    pub fn new(boxes: Vec<BoxDemand>) -> Self {
        DemandSpec {
            boxes,
            reserve_target: S::from_document(DEFAULT_RESERVE_TARGET).expect("reserve target"),
            strict_reserve: false,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CableReserve<S> {
    pub cable: Id,
    pub free_tube_sides: usize,
    pub total_tube_sides: usize,
    pub tube_side_reserve: S,
    pub spliced_fibers: usize,
    pub free_spliced_fibers: usize,
    /// Free fraction of fibers exposed by existing taps.
    pub fiber_reserve: S,
    pub warning: bool,
}

/// Tube-side and fiber reserve per cable.
pub fn reserve_report<S: Scalar>(plant: &FiberPlant<S>) -> Vec<CableReserve<S>> {
    let floor = S::from_document(RESERVE_WARNING_FLOOR).expect("reserve floor");
    plant
        .loops
        .iter()
        .map(|c| {
            let total = c.sides().len() * c.tube_count as usize;
            let free = plant.free_tube_sides(&c.id).len();
            let mut spliced = 0usize;
            let mut used = 0usize;
            for (_, t) in plant.taps().filter(|(_, t)| t.cable == c.id) {
                spliced += t.spliced_fibers.len();
                let tap = t.tap_ref();
                let consumed: BTreeSet<u32> = plant
                    .uplinks_on_tap(&tap)
                    .flat_map(|u| u.fibers.iter().copied())
                    .filter(|f| t.spliced_fibers.contains(f))
                    .collect();
                used += consumed.len();
            }
            let ratio = |num: usize, den: usize| {
                if den == 0 {
                    S::one()
                } else {
                    S::from_count(num) / S::from_count(den)
                }
            };
            let tube_side_reserve = ratio(free, total);
            CableReserve {
                cable: c.id.clone(),
                free_tube_sides: free,
                total_tube_sides: total,
                tube_side_reserve,
                spliced_fibers: spliced,
                free_spliced_fibers: spliced - used,
                fiber_reserve: ratio(spliced - used, spliced),
                warning: tube_side_reserve < floor,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorePortDemand<S> {
    /// One SFP port per uplink.
    pub sfp_ports: usize,
    pub micro4_uplinks: usize,
    pub mini8_uplinks: usize,
    pub outlet_uplinks: usize,
    pub user_ports: u64,
    /// User ports served per core port.
    pub user_ports_per_sfp: S,
}

pub fn core_port_demand<S: Scalar>(plant: &FiberPlant<S>) -> CorePortDemand<S> {
    let mut micro4 = 0;
    let mut mini8 = 0;
    let mut outlets = 0;
    for u in &plant.uplinks {
        match (&u.target, u.served_kind(plant)) {
            (UplinkTarget::Outlet(_), _) => outlets += 1,
            (_, Some(SwitchKind::Micro4)) => micro4 += 1,
            (_, Some(SwitchKind::Mini8)) => mini8 += 1,
            (_, None) => {}
        }
    }
    let user_ports = (micro4 as u64) * u64::from(SwitchKind::Micro4.user_ports())
        + (mini8 as u64) * u64::from(SwitchKind::Mini8.user_ports());
    let sfp_ports = plant.uplinks.len();
    CorePortDemand {
        sfp_ports,
        micro4_uplinks: micro4,
        mini8_uplinks: mini8,
        outlet_uplinks: outlets,
        user_ports,
        user_ports_per_sfp: if sfp_ports == 0 {
            S::zero()
        } else {
            S::from_count(user_ports as usize) / S::from_count(sfp_ports)
        },
    }
}

/// Result of a planning step: new taps and uplinks, uplinks they replace,
/// and the reserve left on each cable once applied.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPlan<S> {
    pub taps: Vec<crate::plant::TubeTap>,
    pub uplinks: Vec<crate::plant::Uplink>,
    pub removed_uplinks: Vec<Id>,
    pub reserve: Vec<CableReserve<S>>,
}

impl<S: Scalar> AllocationPlan<S> {
    pub fn is_empty(&self) -> bool {
        self.taps.is_empty() && self.uplinks.is_empty() && self.removed_uplinks.is_empty()
    }

    /// Produces the plant with this plan applied. Does not validate.
    pub fn apply(&self, plant: &FiberPlant<S>) -> Result<FiberPlant<S>, AllocError> {
        let mut next = plant.clone();
        for tap in &self.taps {
            let bx = next
                .boxes
                .iter_mut()
                .find(|b| b.id == tap.box_id)
                .ok_or_else(|| AllocError::Unknown {
                    kind: "box",
                    id: tap.box_id.clone(),
                })?;
            bx.taps.push(tap.clone());
        }
        for id in &self.removed_uplinks {
            let before = next.uplinks.len();
            next.uplinks.retain(|u| &u.id != id);
            if next.uplinks.len() == before {
                return Err(AllocError::Unknown {
                    kind: "uplink",
                    id: id.clone(),
                });
            }
        }
        next.uplinks.extend(self.uplinks.iter().cloned());
        Ok(next)
    }
}

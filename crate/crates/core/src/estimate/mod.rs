//! Cost roll-up, PoE budgeting and energy/availability reporting.
//!
//! Prices are EUR excluding tax. Default figures come from field experience
//! with micro-switch deployments and can be overridden per plant.

mod cost;
mod power;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

pub use cost::{cost_estimate, purchase_delta, sensitivity, CostEstimate, LineItem, PriceKey};
pub use power::{
    availability_report, delivered_power, energy_report, power_budget, required_injection,
    AvailabilityReport, EnergyReport, EnergyRow, PowerViolation,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("copper length {length_m} m outside 0..={max_m} m")]
    Reach { length_m: f64, max_m: f64 },
    #[error("{injected_w} W is not deliverable by PoE class {class:?}")]
    Class { class: PoeClass, injected_w: f64 },
    #[error("switch '{switch}' has no base power draw (model {model:?})")]
    MissingData { switch: String, model: Option<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoeClass {
    /// 802.3af
    Af,
    /// 802.3at
    At,
    /// 802.3bt, four-pair
    Bt,
}

fn lit<S: Scalar>(v: f64) -> S {
    S::from_document(v).expect("literal representable")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostModel<S> {
    pub fiber_per_m: S,
    pub duplex_sfp: S,
    pub simplex_sfp_pair: S,
    pub micro_switch: S,
    pub mini_switch: S,
    pub transformer_54v: S,
    /// Standard cord lengths (m) to unit price.
    pub patch_cord_by_length: BTreeMap<u32, S>,
}

/// Standard LC-LC patch cord lengths in meters.
pub const PATCH_CORD_LENGTHS: [u32; 4] = [10, 15, 20, 25];

impl<S: Scalar> Default for CostModel<S> {
    fn default() -> Self {
        CostModel {
            fiber_per_m: lit(1.0),
            duplex_sfp: lit(20.0),
            simplex_sfp_pair: lit(60.0),
            micro_switch: lit(350.0),
            mini_switch: lit(350.0),
            transformer_54v: lit(50.0),
            patch_cord_by_length: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerModel<S> {
    pub af_w: S,
    pub at_w: S,
    pub bt_w: S,
    /// Loss per meter of copper at full bt injection.
    pub bt_loss_w_per_m: S,
    /// Cable quality factor applied to the bt loss.
    pub quality_multiplier: S,
    pub max_copper_m: S,
    pub eepoe_saving_per_idle_port_w: S,
    pub transformer_consumption_factor: S,
    /// Per-switch PoE budget when the switch does not declare one.
    pub default_switch_poe_budget_w: S,
    pub night_hours: S,
}

impl<S: Scalar> Default for PowerModel<S> {
    fn default() -> Self {
        PowerModel {
            af_w: lit(15.4),
            at_w: lit(30.0),
            bt_w: lit(90.0),
            bt_loss_w_per_m: lit(0.2),
            quality_multiplier: S::one(),
            max_copper_m: lit(100.0),
            eepoe_saving_per_idle_port_w: S::one(),
            transformer_consumption_factor: lit(2.0),
            default_switch_poe_budget_w: lit(90.0),
            night_hours: lit(10.0),
        }
    }
}

impl<S: Scalar> PowerModel<S> {
    pub fn class_budget(&self, class: PoeClass) -> S {
        match class {
            PoeClass::Af => self.af_w,
            PoeClass::At => self.at_w,
            PoeClass::Bt => self.bt_w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MtbfSpec<S> {
    /// Vendor or model name to MTBF hours.
    pub by_model: BTreeMap<String, S>,
    pub default_hours: S,
    /// Time a failed unit spends away for repair, in years.
    pub repair_turnaround_years: S,
}

pub const HOURS_PER_YEAR: f64 = 8766.0;

impl<S: Scalar> Default for MtbfSpec<S> {
    fn default() -> Self {
        let mut by_model = BTreeMap::new();
        by_model.insert("microsens".to_string(), lit(100_000.0));
        by_model.insert("nexans".to_string(), lit(750_000.0));
        MtbfSpec {
            by_model,
            default_hours: lit(100_000.0),
            repair_turnaround_years: lit(0.25),
        }
    }
}

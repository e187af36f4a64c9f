use std::fmt;

use super::CostModel;
use crate::plant::{FiberPlant, PowerSource, SwitchKind, UplinkMode};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PriceKey {
    FiberPerM,
    DuplexSfp,
    SimplexSfpPair,
    MicroSwitch,
    MiniSwitch,
    Transformer54v,
    PatchCord(u32),
}

impl fmt::Display for PriceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriceKey::FiberPerM => f.write_str("fiber_per_m"),
            PriceKey::DuplexSfp => f.write_str("duplex_sfp"),
            PriceKey::SimplexSfpPair => f.write_str("simplex_sfp_pair"),
            PriceKey::MicroSwitch => f.write_str("micro_switch"),
            PriceKey::MiniSwitch => f.write_str("mini_switch"),
            PriceKey::Transformer54v => f.write_str("transformer_54v"),
            PriceKey::PatchCord(m) => write!(f, "patch_cord_{m}m"),
        }
    }
}

impl PriceKey {
    pub fn parse(text: &str) -> Option<PriceKey> {
        Some(match text {
            "fiber_per_m" => PriceKey::FiberPerM,
            "duplex_sfp" => PriceKey::DuplexSfp,
            "simplex_sfp_pair" => PriceKey::SimplexSfpPair,
            "micro_switch" => PriceKey::MicroSwitch,
            "mini_switch" => PriceKey::MiniSwitch,
            "transformer_54v" => PriceKey::Transformer54v,
            other => {
                let m = other.strip_prefix("patch_cord_")?.strip_suffix('m')?;
                PriceKey::PatchCord(m.parse().ok()?)
            }
        })
    }
}

impl<S: Scalar> CostModel<S> {
    pub fn price(&self, key: PriceKey) -> Option<S> {
        match key {
            PriceKey::FiberPerM => Some(self.fiber_per_m),
            PriceKey::DuplexSfp => Some(self.duplex_sfp),
            PriceKey::SimplexSfpPair => Some(self.simplex_sfp_pair),
            PriceKey::MicroSwitch => Some(self.micro_switch),
            PriceKey::MiniSwitch => Some(self.mini_switch),
            PriceKey::Transformer54v => Some(self.transformer_54v),
            PriceKey::PatchCord(m) => self.patch_cord_by_length.get(&m).copied(),
        }
    }

    pub fn with_price(&self, key: PriceKey, price: S) -> Self {
        let mut m = self.clone();
        match key {
            PriceKey::FiberPerM => m.fiber_per_m = price,
            PriceKey::DuplexSfp => m.duplex_sfp = price,
            PriceKey::SimplexSfpPair => m.simplex_sfp_pair = price,
            PriceKey::MicroSwitch => m.micro_switch = price,
            PriceKey::MiniSwitch => m.mini_switch = price,
            PriceKey::Transformer54v => m.transformer_54v = price,
            PriceKey::PatchCord(len) => {
                m.patch_cord_by_length.insert(len, price);
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineItem<S> {
    pub key: PriceKey,
    pub description: &'static str,
    pub quantity: S,
    pub unit_price: S,
    pub amount: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostEstimate<S> {
    pub items: Vec<LineItem<S>>,
    pub total: S,
    pub assumptions: Vec<String>,
}

impl<S: Scalar> CostEstimate<S> {
    pub fn item(&self, key: PriceKey) -> Option<&LineItem<S>> {
        self.items.iter().find(|i| i.key == key)
    }
}

/// Bill-of-materials quantities for a plant, in `PriceKey` order.
fn quantities<S: Scalar>(plant: &FiberPlant<S>) -> Vec<(PriceKey, &'static str, S)> {
    let count = |n: usize| S::from_count(n);
    let cable_m = S::sum_of(plant.loops.iter().map(|c| c.length_m));
    let duplex = plant
        .uplinks
        .iter()
        .filter(|u| u.mode == UplinkMode::Duplex)
        .count();
    let simplex = plant.uplinks.len() - duplex;
    let micro = plant
        .switches
        .iter()
        .filter(|s| s.kind == SwitchKind::Micro4)
        .count();
    let mini = plant.switches.len() - micro;
    let transformers = plant
        .switches
        .iter()
        .filter(|s| s.power_source == PowerSource::Transformer54)
        .count();

    let mut out = vec![
        (PriceKey::FiberPerM, "loop cable meters", cable_m),
        (PriceKey::DuplexSfp, "duplex SFP LX transceivers", count(2 * duplex)),
        (PriceKey::SimplexSfpPair, "matched simplex SFP pairs", count(simplex)),
        (PriceKey::MicroSwitch, "4-port micro-switches", count(micro)),
        (PriceKey::MiniSwitch, "8-port mini-switches", count(mini)),
        (PriceKey::Transformer54v, "54 V transformers", count(transformers)),
    ];
    let mut cords = std::collections::BTreeMap::<u32, usize>::new();
    for s in &plant.switches {
        if let Some(len) = s.patch_cord_m {
            *cords.entry(len).or_default() += 1;
        }
    }
    for (len, n) in cords {
        out.push((PriceKey::PatchCord(len), "LC-LC patch cords", count(n)));
    }
    out
}

pub fn cost_estimate<S: Scalar>(plant: &FiberPlant<S>, model: &CostModel<S>) -> CostEstimate<S> {
    let mut assumptions = vec!["currency EUR excluding tax".to_string()];
    let items: Vec<LineItem<S>> = quantities(plant)
        .into_iter()
        .map(|(key, description, quantity)| {
            let unit_price = model.price(key).unwrap_or_else(|| {
                assumptions.push(format!("no unit price for {key}, counted at 0"));
                S::zero()
            });
            LineItem {
                key,
                description,
                quantity,
                unit_price,
                amount: quantity * unit_price,
            }
        })
        .collect();
    let total = S::sum_of(items.iter().map(|i| i.amount));
    CostEstimate {
        items,
        total,
        assumptions,
    }
}

/// Change in total cost when one unit price moves by `delta`.
pub fn sensitivity<S: Scalar>(
    plant: &FiberPlant<S>,
    model: &CostModel<S>,
    key: PriceKey,
    delta: S,
) -> S {
    let base = cost_estimate(plant, model).total;
    let current = model.price(key).unwrap_or_else(S::zero);
    let shifted = cost_estimate(plant, &model.with_price(key, current + delta)).total;
    shifted - base
}

/// Cost of items that must be bought to go from `before` to `after`.
///
/// Items that disappear (retired transceivers, removed switches) are not
/// credited back.
pub fn purchase_delta<S: Scalar>(
    before: &FiberPlant<S>,
    after: &FiberPlant<S>,
    model: &CostModel<S>,
) -> S {
    let old = quantities(before);
    let new = quantities(after);
    S::sum_of(new.into_iter().map(|(key, _, q_after)| {
        let q_before = old
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, _, q)| *q)
            .unwrap_or_else(S::zero);
        if q_after > q_before {
            (q_after - q_before) * model.price(key).unwrap_or_else(S::zero)
        } else {
            S::zero()
        }
    }))
}

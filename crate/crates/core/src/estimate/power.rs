use super::{EstimateError, MtbfSpec, PoeClass, PowerModel, HOURS_PER_YEAR};
use crate::plant::{EdgeSwitch, FiberPlant, PoeDevice, PowerSource};
use crate::scalar::Scalar;

fn check_reach<S: Scalar>(length_m: S, model: &PowerModel<S>) -> Result<(), EstimateError> {
    if length_m < S::zero() || length_m > model.max_copper_m {
        return Err(EstimateError::Reach {
            length_m: length_m.to_document(),
            max_m: model.max_copper_m.to_document(),
        });
    }
    Ok(())
}

/// Power reaching the device after `length_m` of copper.
///
/// bt loses `bt_loss_w_per_m` per meter at full injection, scaled by the
/// injected fraction and the cable quality multiplier. af and at are flat.
pub fn delivered_power<S: Scalar>(
    injected_w: S,
    length_m: S,
    class: PoeClass,
    model: &PowerModel<S>,
) -> Result<S, EstimateError> {
    check_reach(length_m, model)?;
    if injected_w < S::zero() || injected_w > model.class_budget(class) {
        return Err(EstimateError::Class {
            class,
            injected_w: injected_w.to_document(),
        });
    }
    Ok(match class {
        PoeClass::Bt => {
            let loss = injected_w * model.bt_loss_w_per_m * length_m * model.quality_multiplier
                / model.bt_w;
            injected_w - loss
        }
        PoeClass::Af | PoeClass::At => injected_w,
    })
}

/// Injection needed at the switch to deliver `demand_w` over `length_m`.
/// `None` when the cable loses everything.
pub fn required_injection<S: Scalar>(
    demand_w: S,
    length_m: S,
    class: PoeClass,
    model: &PowerModel<S>,
) -> Option<S> {
    match class {
        PoeClass::Bt => {
            let keep = model.bt_w - model.bt_loss_w_per_m * length_m * model.quality_multiplier;
            (keep > S::zero()).then(|| demand_w * model.bt_w / keep)
        }
        PoeClass::Af | PoeClass::At => Some(demand_w),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerViolation {
    pub switch: String,
    pub device: Option<String>,
    pub message: String,
}

/// Checks every attached device against its class at its cord length and
/// the aggregate injection against the switch budget.
pub fn power_budget<S: Scalar>(
    switch: &EdgeSwitch<S>,
    demands: &[PoeDevice<S>],
    model: &PowerModel<S>,
) -> Vec<PowerViolation> {
    let mut out = Vec::new();
    let violation = |device: Option<&str>, message: String| PowerViolation {
        switch: switch.id.clone(),
        device: device.map(str::to_string),
        message,
    };
    if demands.is_empty() {
        return out;
    }
    if !switch.poe_capable {
        out.push(violation(None, "switch is not PoE capable".to_string()));
        return out;
    }
    let mut aggregate = S::zero();
    for d in demands {
        let budget = model.class_budget(d.class);
        match delivered_power(budget, d.cord_m, d.class, model) {
            Err(e) => out.push(violation(Some(&d.name), e.to_string())),
            Ok(max) if d.power_w > max => out.push(violation(
                Some(&d.name),
                format!(
                    "demand {} W exceeds {} W deliverable by {:?} at {} m",
                    d.power_w, max, d.class, d.cord_m
                ),
            )),
            Ok(_) => {}
        }
        match required_injection(d.power_w, d.cord_m, d.class, model) {
            Some(w) => aggregate = aggregate + w,
            None => out.push(violation(
                Some(&d.name),
                "cable loses all injected power".to_string(),
            )),
        }
    }
    let limit = switch
        .poe_budget_w
        .unwrap_or(model.default_switch_poe_budget_w);
    if aggregate > limit {
        out.push(violation(
            None,
            format!("aggregate injection {aggregate} W exceeds switch budget {limit} W"),
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow<S> {
    pub switch: String,
    pub base_draw_w: S,
    pub draw_w: S,
    pub eepoe_saving_w: S,
    pub night_saving_wh: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport<S> {
    pub rows: Vec<EnergyRow<S>>,
    pub base_draw_w: S,
    pub transformer_overhead_w: S,
    pub total_draw_w: S,
    pub eepoe_savings_w: S,
    /// Energy saved per night by switching off flagged PoE devices.
    pub night_savings_wh: S,
}

pub fn energy_report<S: Scalar>(plant: &FiberPlant<S>) -> Result<EnergyReport<S>, EstimateError> {
    let pm = &plant.power_model;
    let mut rows = Vec::with_capacity(plant.switches.len());
    for s in &plant.switches {
        let base = s
            .model
            .as_deref()
            .and_then(|m| plant.switch_model(m))
            .and_then(|m| m.base_draw_w)
            .ok_or_else(|| EstimateError::MissingData {
                switch: s.id.clone(),
                model: s.model.clone(),
            })?;
        let draw = match s.power_source {
            PowerSource::Mains230 => base,
            PowerSource::Transformer54 => base * pm.transformer_consumption_factor,
        };
        let night_load = S::sum_of(
            s.poe_devices
                .iter()
                .filter(|d| d.night_off)
                .map(|d| d.power_w),
        );
        rows.push(EnergyRow {
            switch: s.id.clone(),
            base_draw_w: base,
            draw_w: draw,
            eepoe_saving_w: S::from_count(s.idle_ports() as usize) * pm.eepoe_saving_per_idle_port_w,
            night_saving_wh: night_load * pm.night_hours,
        });
    }
    let base_draw_w = S::sum_of(rows.iter().map(|r| r.base_draw_w));
    let total_draw_w = S::sum_of(rows.iter().map(|r| r.draw_w));
    Ok(EnergyReport {
        base_draw_w,
        transformer_overhead_w: total_draw_w - base_draw_w,
        total_draw_w,
        eepoe_savings_w: S::sum_of(rows.iter().map(|r| r.eepoe_saving_w)),
        night_savings_wh: S::sum_of(rows.iter().map(|r| r.night_saving_wh)),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvailabilityReport<S> {
    pub fleet_size: usize,
    pub expected_failures_per_year: S,
    pub recommended_spares: u64,
}

/// MTBF hours for a switch: its model entry, then the vendor table, then the default.
fn mtbf_hours<S: Scalar>(plant: &FiberPlant<S>, switch: &EdgeSwitch<S>, spec: &MtbfSpec<S>) -> S {
    let Some(name) = switch.model.as_deref() else {
        return spec.default_hours;
    };
    plant
        .switch_model(name)
        .and_then(|m| m.mtbf_hours)
        .or_else(|| spec.by_model.get(name).copied())
        .unwrap_or(spec.default_hours)
}

pub fn availability_report<S: Scalar>(
    plant: &FiberPlant<S>,
    spec: &MtbfSpec<S>,
) -> AvailabilityReport<S> {
    let hours_per_year = S::from_document(HOURS_PER_YEAR).expect("hours per year");
    let expected = S::sum_of(
        plant
            .switches
            .iter()
            .map(|s| hours_per_year / mtbf_hours(plant, s, spec)),
    );
    AvailabilityReport {
        fleet_size: plant.switches.len(),
        expected_failures_per_year: expected,
        recommended_spares: (expected * spec.repair_turnaround_years).ceil_count(),
    }
}

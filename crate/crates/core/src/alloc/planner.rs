use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{reserve_report, AllocError, AllocationPlan, DemandSpec, UplinkRequest};
use crate::plant::{
    BidiPolarity, CorePort, FiberPlant, Id, Side, TapRef, TubeTap, Uplink, UplinkMode,
    UplinkTarget,
};
use crate::scalar::Scalar;

/// Fibers still usable on a tap.
#[derive(Debug, Clone)]
struct FiberPool {
    free: BTreeSet<u32>,
}

impl FiberPool {
    fn take(&mut self, mode: UplinkMode) -> Option<Vec<u32>> {
        let fibers = match mode {
            UplinkMode::Duplex => {
                let first = self
                    .free
                    .iter()
                    .copied()
                    .find(|&f| f % 2 == 1 && self.free.contains(&(f + 1)))?;
                vec![first, first + 1]
            }
            UplinkMode::Simplex => vec![*self.free.iter().next()?],
        };
        for f in &fibers {
            self.free.remove(f);
        }
        Some(fibers)
    }
}

fn existing_pool<S: Scalar>(plant: &FiberPlant<S>, tap: &TubeTap) -> FiberPool {
    let tap_ref = tap.tap_ref();
    let used: BTreeSet<u32> = plant
        .uplinks_on_tap(&tap_ref)
        .flat_map(|u| u.fibers.iter().copied())
        .collect();
    FiberPool {
        free: tap.spliced_fibers.difference(&used).copied().collect(),
    }
}

/// Refuses to hand out a simplex fiber whose pair partner runs a BiDi link
/// with both ends on the same polarity.
fn check_partner_polarity<S: Scalar>(
    plant: &FiberPlant<S>,
    tap: &TapRef,
    fiber: u32,
) -> Result<(), AllocError> {
    let partner = if fiber % 2 == 1 { fiber + 1 } else { fiber - 1 };
    for u in plant.uplinks_on_tap(tap) {
        if u.mode == UplinkMode::Simplex
            && u.fibers.contains(&partner)
            && u.bidi.is_some_and(|b| !b.is_matched())
        {
            return Err(AllocError::Polarity(format!(
                "simplex uplink '{}' on {tap} has mismatched polarity",
                u.id
            )));
        }
    }
    Ok(())
}

/// Hands out core SFP ports in ascending order per core.
struct CorePorts {
    used: HashMap<Id, BTreeSet<u32>>,
    capacity: HashMap<Id, u32>,
}

impl CorePorts {
    fn new<S: Scalar>(plant: &FiberPlant<S>) -> Self {
        let mut used: HashMap<Id, BTreeSet<u32>> = HashMap::new();
        for u in &plant.uplinks {
            used.entry(u.core_port.core.clone())
                .or_default()
                .insert(u.core_port.port);
        }
        CorePorts {
            used,
            capacity: plant
                .cores
                .iter()
                .map(|c| (c.id.clone(), c.sfp_port_count))
                .collect(),
        }
    }

    fn release(&mut self, port: &CorePort) {
        if let Some(set) = self.used.get_mut(&port.core) {
            set.remove(&port.port);
        }
    }

    fn take(&mut self, core: &str) -> Result<CorePort, AllocError> {
        let cap = self.capacity.get(core).copied().ok_or_else(|| AllocError::Unknown {
            kind: "core",
            id: core.to_string(),
        })?;
        let used = self.used.entry(core.to_string()).or_default();
        let port = (0..cap).find(|p| !used.contains(p)).ok_or_else(|| {
            AllocError::Capacity(format!("core '{core}' has no free SFP port out of {cap}"))
        })?;
        used.insert(port);
        Ok(CorePort {
            core: core.to_string(),
            port,
        })
    }
}

fn new_uplink(
    tap: &TapRef,
    mode: UplinkMode,
    fibers: Vec<u32>,
    core_port: CorePort,
    target: UplinkTarget,
) -> Uplink {
    Uplink {
        id: Uplink::uplink_id(tap, fibers[0]),
        mode,
        tap: tap.clone(),
        fibers,
        transceiver_polish: crate::plant::Polish::Upc,
        bidi: (mode == UplinkMode::Simplex).then_some(BidiPolarity::STANDARD),
        core_port,
        target,
    }
}

/// Assigns one uplink on an existing tap of `box_id`, without creating taps.
///
/// Taps are tried in (tube, side) order. Duplex takes the lowest free pair
/// `(2k-1, 2k)`, simplex the lowest free fiber.
pub fn assign_uplink<S: Scalar>(
    plant: &FiberPlant<S>,
    box_id: &str,
    mode: UplinkMode,
) -> Result<Uplink, AllocError> {
    let bx = plant.breakout_box(box_id).ok_or_else(|| AllocError::Unknown {
        kind: "box",
        id: box_id.to_string(),
    })?;
    let mut taps: Vec<&TubeTap> = bx.taps.iter().collect();
    taps.sort_by_key(|t| (t.tube, t.side));
    for tap in taps {
        let mut pool = existing_pool(plant, tap);
        if let Some(fibers) = pool.take(mode) {
            let tap_ref = tap.tap_ref();
            if mode == UplinkMode::Simplex {
                check_partner_polarity(plant, &tap_ref, fibers[0])?;
            }
            let cable = plant.cable(&tap.cable).ok_or_else(|| AllocError::Unknown {
                kind: "cable",
                id: tap.cable.clone(),
            })?;
            let port = CorePorts::new(plant).take(cable.core_for(tap.side))?;
            return Ok(new_uplink(
                &tap_ref,
                mode,
                fibers,
                port,
                UplinkTarget::Reserved(crate::plant::SwitchKind::Micro4),
            ));
        }
    }
    Err(AllocError::Capacity(format!(
        "no tap at box '{box_id}' has a free {} slot",
        match mode {
            UplinkMode::Duplex => "duplex pair",
            UplinkMode::Simplex => "fiber",
        }
    )))
}

/// Where a request's fibers come from before tubes are bound.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Existing(usize),
    /// n-th new tap of the box.
    New(usize),
}

struct BoxWork<'a, S> {
    box_id: &'a str,
    cable: &'a str,
    chainage: S,
    new_taps: usize,
    assignments: Vec<(&'a UplinkRequest, Slot, Vec<u32>)>,
}

/// A new tap waiting for a tube.
#[derive(Debug, Clone)]
struct TapNeed<'a, S> {
    box_id: &'a str,
    chainage: S,
    ordinal: usize,
}

fn validate_demand<S: Scalar>(plant: &FiberPlant<S>, demand: &DemandSpec<S>) -> Result<(), AllocError> {
    if demand.reserve_target < S::zero() || demand.reserve_target >= S::one() {
        return Err(AllocError::Demand(format!(
            "reserve target {} outside [0, 1)",
            demand.reserve_target
        )));
    }
    let mut boxes = BTreeSet::new();
    let mut switches = BTreeSet::new();
    for bd in &demand.boxes {
        if plant.breakout_box(&bd.box_id).is_none() {
            return Err(AllocError::Unknown {
                kind: "box",
                id: bd.box_id.clone(),
            });
        }
        if !boxes.insert(bd.box_id.as_str()) {
            return Err(AllocError::Demand(format!("box '{}' listed twice", bd.box_id)));
        }
        for r in &bd.requests {
            let Some(sid) = &r.switch else { continue };
            let sw = plant.switch(sid).ok_or_else(|| AllocError::Unknown {
                kind: "switch",
                id: sid.clone(),
            })?;
            if sw.box_id != bd.box_id {
                return Err(AllocError::Demand(format!(
                    "switch '{sid}' is patched to box '{}', not '{}'",
                    sw.box_id, bd.box_id
                )));
            }
            if sw.kind != r.kind {
                return Err(AllocError::Demand(format!(
                    "switch '{sid}' is {:?}, request says {:?}",
                    sw.kind, r.kind
                )));
            }
            if plant.uplink_of_switch(sid).is_some() || !switches.insert(sid.as_str()) {
                return Err(AllocError::Demand(format!("switch '{sid}' already has an uplink")));
            }
        }
    }
    Ok(())
}

/// (box, ordinal of the box's new tap) -> (tube, side).
type Bindings = BTreeMap<(String, usize), (u32, Side)>;

/// Binds new taps to `(tube, side)` slots on one cable.
///
/// Half-used tubes are closed first. Remaining needs, sorted by chainage,
/// are paired `i` with `i + h` where `h` is the least tube count that keeps
/// paired taps on distinct boxes; the earlier tap of a pair goes toward A.
/// Unpaired taps go toward A in the first half of the cable, toward B in the
/// second.
fn bind_tubes<S: Scalar>(
    plant: &FiberPlant<S>,
    cable_id: &str,
    mut needs: Vec<TapNeed<'_, S>>,
) -> Result<Bindings, AllocError> {
    let cable = plant.cable(cable_id).ok_or_else(|| AllocError::Unknown {
        kind: "cable",
        id: cable_id.to_string(),
    })?;
    let allow_same = plant.allow_same_box_double_tap;
    needs.sort_by(|a, b| {
        a.chainage
            .partial_cmp(&b.chainage)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.box_id.cmp(b.box_id))
            .then_with(|| a.ordinal.cmp(&b.ordinal))
    });

    // tube -> side -> (box, chainage)
    let mut occupied: BTreeMap<u32, BTreeMap<Side, (&str, S)>> = BTreeMap::new();
    for (bx, t) in plant.taps().filter(|(_, t)| t.cable == cable_id) {
        occupied
            .entry(t.tube)
            .or_default()
            .insert(t.side, (bx.id.as_str(), bx.chainage_m));
    }

    let mut out = BTreeMap::new();
    let mut remaining = Vec::new();
    for need in needs {
        let reuse = if cable.point_to_point {
            None
        } else {
            occupied.iter().find_map(|(&tube, sides)| {
                if sides.len() != 1 {
                    return None;
                }
                let (&side, &(bx, p)) = sides.iter().next()?;
                let same = bx == need.box_id;
                let fits = match side {
                    Side::TowardA => p < need.chainage || (same && allow_same),
                    Side::TowardB => need.chainage < p || (same && allow_same),
                };
                fits.then_some((tube, side.other()))
            })
        };
        match reuse {
            Some((tube, side)) => {
                occupied
                    .entry(tube)
                    .or_default()
                    .insert(side, (need.box_id, need.chainage));
                out.insert((need.box_id.to_string(), need.ordinal), (tube, side));
            }
            None => remaining.push(need),
        }
    }

    let fresh: Vec<u32> = (1..=cable.tube_count)
        .filter(|t| !occupied.contains_key(t))
        .collect();
    let total = remaining.len();
    if total == 0 {
        return Ok(out);
    }
    let span = if cable.point_to_point {
        total
    } else {
        let mut per_box: BTreeMap<&str, usize> = BTreeMap::new();
        for n in &remaining {
            *per_box.entry(n.box_id).or_default() += 1;
        }
        let half = total.div_ceil(2);
        if allow_same {
            half
        } else {
            half.max(per_box.values().copied().max().unwrap_or(0))
        }
    };
    if span > fresh.len() {
        return Err(AllocError::Capacity(format!(
            "cable '{cable_id}' needs {span} free tubes for {total} new taps, {} available",
            fresh.len()
        )));
    }
    let half_length = cable.length_m / S::two();
    for (i, &tube) in fresh.iter().take(span).enumerate() {
        let first = &remaining[i];
        if let Some(second) = remaining.get(i + span) {
            out.insert((first.box_id.to_string(), first.ordinal), (tube, Side::TowardA));
            out.insert((second.box_id.to_string(), second.ordinal), (tube, Side::TowardB));
        } else {
            let side = if cable.point_to_point || first.chainage <= half_length {
                Side::TowardA
            } else {
                Side::TowardB
            };
            out.insert((first.box_id.to_string(), first.ordinal), (tube, side));
        }
    }
    Ok(out)
}

/// Plans taps and uplinks for every request, or fails without a partial plan.
pub fn allocate<S: Scalar>(
    plant: &FiberPlant<S>,
    demand: &DemandSpec<S>,
) -> Result<AllocationPlan<S>, AllocError> {
    validate_demand(plant, demand)?;

    let mut order: Vec<_> = demand
        .boxes
        .iter()
        .map(|bd| {
            let bx = plant.breakout_box(&bd.box_id).expect("validated");
            let cable_idx = plant.cable_index(&bx.cable).unwrap_or(usize::MAX);
            (cable_idx, bx, bd)
        })
        .collect();
    order.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| {
                a.1.chainage_m
                    .partial_cmp(&b.1.chainage_m)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .then_with(|| a.1.id.cmp(&b.1.id))
    });

    // Fill existing taps first, then as many whole-tube taps as needed.
    let mut works = Vec::with_capacity(order.len());
    for (_, bx, bd) in &order {
        let cable = plant.cable(&bx.cable).ok_or_else(|| AllocError::Unknown {
            kind: "cable",
            id: bx.cable.clone(),
        })?;
        let mut existing: Vec<(usize, &TubeTap)> = bx.taps.iter().enumerate().collect();
        existing.sort_by_key(|(_, t)| (t.tube, t.side));
        let mut pools: Vec<(Slot, FiberPool)> = existing
            .iter()
            .map(|&(i, t)| (Slot::Existing(i), existing_pool(plant, t)))
            .collect();
        let mut work = BoxWork {
            box_id: &bx.id,
            cable: &bx.cable,
            chainage: bx.chainage_m,
            new_taps: 0,
            assignments: Vec::new(),
        };
        for req in &bd.requests {
            let mut placed = false;
            for (slot, pool) in pools.iter_mut() {
                if let Some(fibers) = pool.take(req.mode) {
                    if let (Slot::Existing(i), UplinkMode::Simplex) = (*slot, req.mode) {
                        check_partner_polarity(plant, &bx.taps[i].tap_ref(), fibers[0])?;
                    }
                    work.assignments.push((req, *slot, fibers));
                    placed = true;
                    break;
                }
            }
            if placed {
                continue;
            }
            let mut pool = FiberPool {
                free: (1..=cable.fibers_per_tube).collect(),
            };
            let fibers = pool.take(req.mode).ok_or_else(|| {
                AllocError::Capacity(format!(
                    "a {}-fiber tube cannot carry a {:?} uplink",
                    cable.fibers_per_tube, req.mode
                ))
            })?;
            let slot = Slot::New(work.new_taps);
            work.new_taps += 1;
            work.assignments.push((req, slot, fibers));
            pools.push((slot, pool));
        }
        works.push(work);
    }

    // Bind new taps to tubes, cable by cable.
    let mut needs_by_cable: BTreeMap<&str, Vec<TapNeed<'_, S>>> = BTreeMap::new();
    for w in &works {
        for ordinal in 0..w.new_taps {
            needs_by_cable.entry(w.cable).or_default().push(TapNeed {
                box_id: w.box_id,
                chainage: w.chainage,
                ordinal,
            });
        }
    }
    let mut bound = BTreeMap::new();
    for (cable, needs) in needs_by_cable {
        bound.extend(bind_tubes(plant, cable, needs)?);
    }

    let mut taps = Vec::new();
    let mut uplinks = Vec::new();
    let mut ports = CorePorts::new(plant);
    for (w, (_, bx, _)) in works.iter().zip(&order) {
        let cable = plant.cable(w.cable).expect("box cable exists");
        let m = cable.fibers_per_tube;
        let new_refs: Vec<TapRef> = (0..w.new_taps)
            .map(|ordinal| {
                let (tube, side) = bound[&(w.box_id.to_string(), ordinal)];
                taps.push(TubeTap {
                    cable: w.cable.to_string(),
                    tube,
                    side,
                    box_id: w.box_id.to_string(),
                    spliced_fibers: (1..=m).collect(),
                });
                TapRef {
                    cable: w.cable.to_string(),
                    tube,
                    side,
                }
            })
            .collect();
        for (req, slot, fibers) in &w.assignments {
            let tap = match slot {
                Slot::Existing(i) => bx.taps[*i].tap_ref(),
                Slot::New(n) => new_refs[*n].clone(),
            };
            let port = ports.take(cable.core_for(tap.side))?;
            let target = match &req.switch {
                Some(id) => UplinkTarget::Switch(id.clone()),
                None => UplinkTarget::Reserved(req.kind),
            };
            uplinks.push(new_uplink(&tap, req.mode, fibers.clone(), port, target));
        }
    }

    let mut plan = AllocationPlan {
        taps,
        uplinks,
        removed_uplinks: Vec::new(),
        reserve: Vec::new(),
    };
    let applied = plan.apply(plant)?;
    plan.reserve = reserve_report(&applied);
    if demand.strict_reserve {
        let touched: BTreeSet<&str> = plan.taps.iter().map(|t| t.cable.as_str()).collect();
        if let Some(r) = plan
            .reserve
            .iter()
            .find(|r| touched.contains(r.cable.as_str()) && r.tube_side_reserve < demand.reserve_target)
        {
            return Err(AllocError::Reserve {
                cable: r.cable.clone(),
                achieved: r.tube_side_reserve.to_document(),
                target: demand.reserve_target.to_document(),
            });
        }
    }
    Ok(plan)
}

/// Replaces each selected duplex uplink over `(i, j)` by two BiDi simplex
/// uplinks. The original endpoints keep fiber `i`; fiber `j` becomes a
/// provisioned slot for a switch of the same kind on a new core port.
pub fn convert_duplex_to_simplex<S: Scalar>(
    plant: &FiberPlant<S>,
    selection: &[Id],
) -> Result<AllocationPlan<S>, AllocError> {
    let mut ports = CorePorts::new(plant);
    let mut removed = Vec::new();
    let mut uplinks = Vec::new();
    let mut seen = BTreeSet::new();
    let mut originals = Vec::with_capacity(selection.len());
    for id in selection {
        if !seen.insert(id) {
            continue;
        }
        let u = plant.uplink(id).ok_or_else(|| AllocError::Unknown {
            kind: "uplink",
            id: id.clone(),
        })?;
        if u.mode != UplinkMode::Duplex {
            return Err(AllocError::Mode(id.clone()));
        }
        originals.push(u);
    }
    for u in originals {
        let (first, second) = (u.fibers[0], u.fibers[1]);
        let kind = u
            .served_kind(plant)
            .unwrap_or(crate::plant::SwitchKind::Micro4);
        removed.push(u.id.clone());
        uplinks.push(new_uplink(
            &u.tap,
            UplinkMode::Simplex,
            vec![first],
            u.core_port.clone(),
            u.target.clone(),
        ));
        // Keep the original port reserved for fiber i.
        ports.release(&u.core_port);
        ports
            .used
            .entry(u.core_port.core.clone())
            .or_default()
            .insert(u.core_port.port);
        let port = ports.take(&u.core_port.core)?;
        uplinks.push(new_uplink(
            &u.tap,
            UplinkMode::Simplex,
            vec![second],
            port,
            UplinkTarget::Reserved(kind),
        ));
    }
    let mut plan = AllocationPlan {
        taps: Vec::new(),
        uplinks,
        removed_uplinks: removed,
        reserve: Vec::new(),
    };
    plan.reserve = reserve_report(&plan.apply(plant)?);
    Ok(plan)
}

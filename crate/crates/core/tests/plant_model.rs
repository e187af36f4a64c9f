mod common;

use std::collections::BTreeSet;

use common::{loop_doc, plant_from, push_tap, site};
use ftto::plant::{
    load_plant_str, plant_to_json, validate_plant, FiberPlant, PlantError, Severity, Side,
};
use ftto::Plant;
use proptest::prelude::*;
use serde_json::json;

fn errors(plant: &Plant) -> Vec<String> {
    validate_plant(plant)
        .into_iter()
        .filter(|v| v.severity == Severity::Error)
        .map(|v| v.message)
        .collect()
}

#[test]
fn minimal_document_has_no_taps() {
    let p: Plant = plant_from(&loop_doc(300, 12, 12, &[]));
    assert_eq!(p.total_fibers(), 144);
    assert_eq!(p.tap_count(), 0);
    assert!(validate_plant(&p).is_empty());
}

#[test]
fn decreasing_chainages_rejected() {
    let doc = loop_doc(300, 12, 12, &[50, 40]);
    let err = load_plant_str::<f64>(&doc.to_string()).unwrap_err();
    match err {
        PlantError::Invariant { path, message } => {
            assert!(message.contains("chainages strictly increasing"), "{message}");
            assert!(path.starts_with("loops[0]") || path.starts_with("boxes"), "{path}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn legi_site_has_216_fibers() {
    let p: Plant = site("legi.json");
    assert_eq!(p.loops.len(), 3);
    assert_eq!(p.total_fibers(), 216);
}

#[test]
fn malformed_and_dangling_documents() {
    assert!(matches!(
        load_plant_str::<f64>("{not json"),
        Err(PlantError::Schema { .. })
    ));
    let mut doc = loop_doc(300, 12, 12, &[10]);
    doc["boxes"][0]["cable"] = json!("nope");
    assert!(matches!(
        load_plant_str::<f64>(&doc.to_string()),
        Err(PlantError::Reference { .. })
    ));
    let mut doc = loop_doc(300, 12, 12, &[]);
    doc["schema_version"] = json!("2");
    assert!(matches!(
        load_plant_str::<f64>(&doc.to_string()),
        Err(PlantError::Schema { .. })
    ));
}

#[test]
fn three_cores_rejected() {
    let mut doc = loop_doc(300, 1, 2, &[]);
    doc["cores"] = json!([
        {"id": "c1", "sfp_port_count": 1},
        {"id": "c2", "sfp_port_count": 1},
        {"id": "c3", "sfp_port_count": 1}
    ]);
    doc["loops"][0]["end_a_core"] = json!("c1");
    assert!(load_plant_str::<f64>(&doc.to_string()).is_err());
}

#[test]
fn tap_order_violation_reported() {
    let mut doc = loop_doc(100, 12, 12, &[20, 80]);
    push_tap(&mut doc, 1, 3, "toward_a");
    push_tap(&mut doc, 0, 3, "toward_b");
    let plant = ftto::plant::assemble_plant::<f64>(&ftto::plant::parse_document(&doc.to_string()).unwrap()).unwrap();
    assert!(errors(&plant).iter().any(|m| m.contains("tap order violated")));
    // The interval model agrees: the two live segments overlap.
    assert!(common::segments_overlap(80.0, 20.0, 100.0));
    assert!(load_plant_str::<f64>(&doc.to_string()).is_err());
}

#[test]
fn same_box_double_tap_is_warning_only_when_allowed() {
    let mut doc = loop_doc(100, 2, 12, &[50]);
    push_tap(&mut doc, 0, 1, "toward_a");
    push_tap(&mut doc, 0, 1, "toward_b");
    let text = doc.to_string();
    assert!(load_plant_str::<f64>(&text).is_err());
    doc["site"]["allow_same_box_double_tap"] = json!(true);
    let p: Plant = plant_from(&doc);
    let v = validate_plant(&p);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].severity, Severity::Warning);
}

#[test]
fn apc_box_without_hybrid_cord_warns() {
    let mut doc = loop_doc(100, 2, 12, &[50]);
    push_tap(&mut doc, 0, 1, "toward_a");
    doc["boxes"][0]["port_polish"] = json!("APC");
    doc["offices"] = json!([{"id": "o1", "room": "a1"}]);
    doc["switches"] = json!([{"id": "s1", "kind": "micro4", "office": "o1", "box": "b1"}]);
    doc["uplinks"] = json!([{"mode": "duplex", "cable": "L1", "tube": 1, "side": "toward_a",
        "fibers": [1, 2], "core": "core", "core_port": 0, "target": {"switch": "s1"}}]);
    let p: Plant = plant_from(&doc);
    let v = validate_plant(&p);
    assert!(v
        .iter()
        .any(|x| x.severity == Severity::Warning && x.message.contains("polish mismatch LC/APC↔LC/UPC")));
    doc["switches"][0]["hybrid_cord"] = json!(true);
    let p: Plant = plant_from(&doc);
    assert!(validate_plant(&p).is_empty());
}

#[test]
fn panel_port_examples() {
    let one: Plant = site("reference_loop.json");
    assert_eq!(one.panel_port_count(), 288);
    let legi: Plant = site("legi.json");
    assert_eq!(legi.panel_port_count(), 432);
    let tiny: Plant = plant_from(&loop_doc(10, 1, 2, &[]));
    assert_eq!(tiny.panel_port_count(), 4);
}

#[test]
fn equivalent_capacity_examples() {
    let p: Plant = site("reference_loop.json");
    assert_eq!(FiberPlant::equivalent_tube_capacity(&p.loops[0]), 24);
    let tiny: Plant = plant_from(&loop_doc(10, 1, 2, &[]));
    assert_eq!(FiberPlant::equivalent_tube_capacity(&tiny.loops[0]), 2);

    // Twelve TowardA taps spread over twelve boxes leave twelve B slots.
    let chain: Vec<u32> = (1..=12).map(|i| i * 10).collect();
    let mut doc = loop_doc(200, 12, 12, &chain);
    for i in 0..12 {
        push_tap(&mut doc, i, i as u32 + 1, "toward_a");
    }
    let p: Plant = plant_from(&doc);
    let free = p.free_tube_sides("L1");
    let by_enumeration = (1..=12u32)
        .flat_map(|t| [(t, Side::TowardA), (t, Side::TowardB)])
        .filter(|slot| !p.taps().any(|(_, tap)| (tap.tube, tap.side) == *slot))
        .count();
    assert_eq!(free.len(), 12);
    assert_eq!(by_enumeration, 12);
    assert!(free.iter().all(|(_, s)| *s == Side::TowardB));
}

#[test]
fn point_to_point_run() {
    let mut doc = loop_doc(80, 2, 12, &[60]);
    doc["loops"][0]["point_to_point"] = json!(true);
    push_tap(&mut doc, 0, 1, "toward_a");
    let p: Plant = plant_from(&doc);
    assert_eq!(p.panel_port_count(), 24);
    assert!(validate_plant(&p).is_empty());
    push_tap(&mut doc, 0, 2, "toward_b");
    assert!(load_plant_str::<f64>(&doc.to_string()).is_err());
}

#[test]
fn golden_sites_validate_cleanly() {
    for name in ["reference_loop.json", "legi.json", "desk_redundancy.json"] {
        let p: Plant = site(name);
        assert!(errors(&p).is_empty(), "{name}");
    }
}

fn quadruples(p: &Plant) -> BTreeSet<(String, bool, u32, u32)> {
    let mut out = BTreeSet::new();
    for c in &p.loops {
        for end in [false, true] {
            if end && c.point_to_point {
                continue;
            }
            for t in 1..=c.tube_count {
                for f in 1..=c.fibers_per_tube {
                    out.insert((c.id.clone(), end, t, f));
                }
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn panel_ports_match_enumeration(
        cables in prop::collection::vec((1u32..=4, 1u32..=12, any::<bool>()), 1..4)
    ) {
        let loops: Vec<_> = cables.iter().enumerate().map(|(i, (t, f, p2p))| json!({
            "id": format!("L{i}"), "length_m": 100, "tube_count": t,
            "fibers_per_tube": f, "end_a_core": "core", "point_to_point": p2p
        })).collect();
        let doc = json!({"schema_version": "1", "site": {"name": "p"}, "loops": loops,
            "cores": [{"id": "core", "sfp_port_count": 1}]});
        let p: Plant = plant_from(&doc);
        prop_assert_eq!(p.panel_port_count(), quadruples(&p).len() as u64);
    }

    #[test]
    fn document_round_trip(seed in any::<u64>()) {
        let mut gen = common::PlantGen::new(seed);
        let doc = gen.loop_plant(4, 6, seed % 2 == 0);
        let first: Plant = plant_from(&doc);
        let text = plant_to_json(&first);
        let second: Plant = load_plant_str(&text).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(plant_to_json(&second), text);
    }
}

#[test]
fn golden_round_trip_with_uplinks() {
    for name in ["legi.json", "desk_redundancy.json"] {
        let first: Plant = site(name);
        let second: Plant = load_plant_str(&plant_to_json(&first)).unwrap();
        assert_eq!(first, second);
    }
}

#[test]
fn uplink_fibers_lie_in_spliced_set() {
    let mut doc = loop_doc(100, 2, 12, &[50]);
    doc["boxes"][0]["taps"] = json!([{"tube": 1, "side": "toward_a", "fibers": [1, 2]}]);
    doc["offices"] = json!([{"id": "o1", "room": "a1"}]);
    doc["switches"] = json!([{"id": "s1", "kind": "micro4", "office": "o1", "box": "b1"}]);
    doc["uplinks"] = json!([{"mode": "duplex", "cable": "L1", "tube": 1, "side": "toward_a",
        "fibers": [3, 4], "core": "core", "core_port": 0, "target": {"switch": "s1"}}]);
    assert!(load_plant_str::<f64>(&doc.to_string()).is_err());
}

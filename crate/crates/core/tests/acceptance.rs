//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    cli_invocations, fleet_doc, pair_plant, plant_from, run_in_fresh_dir, site, site_text,
    stp_violation, tap_violation, PlantGen,
};
use ftto::alloc::{allocate, convert_duplex_to_simplex, core_port_demand, demand_from_json, AllocError};
use ftto::estimate::{delivered_power, sensitivity, CostModel, PoeClass, PowerModel, PriceKey};
use ftto::failsim::{build_graph, enumerate_single_failures, spanning_tree};
use ftto::labels::{BoxPortLabel, ColorScheme, Direction, FiberRef, PortSuffix};
use ftto::plant::{validate_plant, FiberPlant, Severity};
use ftto::{Exact, ExactPlant, Plant};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed <= limit {
        Ok(format!("{} ms", elapsed.as_millis()))
    } else {
        Err(format!("took {} ms, limit {} ms", elapsed.as_millis(), limit.as_millis()))
    }
}

fn no_errors<S: ftto::Scalar>(p: &FiberPlant<S>) -> bool {
    validate_plant(p).iter().all(|v| v.severity != Severity::Error)
}

fn legi_arithmetic() -> Outcome {
    let start = Instant::now();
    let plant: ExactPlant = site("legi.json");
    let ports = plant.panel_port_count();
    let (spec, _) = demand_from_json::<Exact>(&site_text("legi_demand.json")).map_err(|e| e.to_string())?;
    let duplex = allocate(&plant, &spec)
        .and_then(|p| p.apply(&plant))
        .map_err(|e| e.to_string())?;
    let d = core_port_demand(&duplex);
    let ids: Vec<String> = duplex.uplinks.iter().map(|u| u.id.clone()).collect();
    let simplex = convert_duplex_to_simplex(&duplex, &ids)
        .and_then(|p| p.apply(&duplex))
        .map_err(|e| e.to_string())?;
    let s = core_port_demand(&simplex);
    let elapsed = start.elapsed();
    let got = (ports, d.sfp_ports, d.user_ports, s.sfp_ports, s.user_ports);
    ensure!(got == (432, 216, 864, 432, 1728), "got {got:?}");
    ensure!(no_errors(&duplex) && no_errors(&simplex), "allocated plant fails validation");
    let t = within(elapsed, Duration::from_secs(1))?;
    Ok(format!("432 panel ports, 216/864 duplex, 432/1728 simplex, {t}"))
}

fn reference_loop() -> Outcome {
    let plant: ExactPlant = site("reference_loop.json");
    let ports = plant.panel_port_count();
    let tubes = FiberPlant::equivalent_tube_capacity(&plant.loops[0]);
    ensure!((ports, tubes) == (288, 24), "got {ports} ports, {tubes} tubes");
    Ok("288 panel ports, equivalent to 24 tubes".into())
}

fn tube_reuse() -> Outcome {
    let start = Instant::now();
    let (mut planned, mut refused, mut taps) = (0, 0, 0);
    // Keep drawing until enough plants accept their demand; refused ones still
    // must fail cleanly with a capacity error.
    let mut seed = 0u64;
    while planned < 1200 && seed < 20_000 {
        seed += 1;
        let mut gen = PlantGen::new(seed);
        let doc = gen.loop_plant(4, 6, seed.is_multiple_of(4));
        let dem = gen.demand(&doc, 1 + (seed % 12) as usize);
        let plant: Plant = plant_from(&doc);
        let (spec, _) = demand_from_json::<f64>(&dem.to_string()).map_err(|e| e.to_string())?;
        match allocate(&plant, &spec) {
            Ok(plan) => {
                let after = plan.apply(&plant).map_err(|e| e.to_string())?;
                if let Some(v) = tap_violation(&after) {
                    return Err(format!("seed {seed}: {v}"));
                }
                ensure!(no_errors(&after), "seed {seed}: plan fails validation");
                planned += 1;
                taps += plan.taps.len();
            }
            Err(AllocError::Capacity(_)) => refused += 1,
            Err(e) => return Err(format!("seed {seed}: {e}")),
        }
    }
    ensure!(planned >= 1000, "only {planned} plants allocated");
    let t = within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "{planned} plants allocated ({taps} new taps), {refused} refused for capacity, 0 violations, {t}"
    ))
}

fn redundancy() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let mut cuts = 0usize;
    for i in 0..300 {
        let pairs = rng.gen_range(1..=4);
        let doc = pair_plant(&mut rng, pairs, true, false);
        let plant: Plant = plant_from(&doc);
        let report = enumerate_single_failures(&plant).map_err(|e| e.to_string())?;
        cuts += report.rows.iter().filter(|r| r.event.starts_with("cable_cut")).count();
        ensure!(report.max_cable_cut_loss == 0, "plant {i}: a cut loses {} ports", report.max_cable_cut_loss);

        let k = rng.gen_range(0..pairs);
        let mut bare = plant.clone();
        for s in &mut bare.switches {
            if s.id == format!("S{k}a") || s.id == format!("S{k}b") {
                s.cross_link_peer = None;
            }
        }
        let report = enumerate_single_failures(&bare).map_err(|e| e.to_string())?;
        let exact4 = report
            .rows
            .iter()
            .any(|r| r.event.starts_with("cable_cut") && r.lost_user_ports == 4);
        ensure!(exact4, "plant {i}: no cut loses exactly 4 ports without copper");
    }
    let t = within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("300 plants, {cuts} cut intervals, 0 ports lost; unlinked pair loses 4, {t}"))
}

fn stp_oracle() -> Outcome {
    let mut checked = 0;
    let mut rng = StdRng::seed_from_u64(5);
    for dual in [false, true] {
        let max_pairs = if dual { 2 } else { 3 };
        for pairs in 1..=max_pairs {
            for copper_mask in 0..(1u32 << pairs) {
                for orphan_mask in 0..(1u32 << pairs) {
                    if orphan_mask & !copper_mask != 0 {
                        continue;
                    }
                    for variant in 0..12 {
                        let mut doc = pair_plant(&mut rng, pairs, true, dual);
                        if dual {
                            doc["site"]["core_interconnect"] = json!(variant % 2 == 0);
                        }
                        let mut uplinks = doc["uplinks"].as_array().unwrap().clone();
                        for k in 0..pairs {
                            if copper_mask & (1 << k) == 0 {
                                for j in [2 * k, 2 * k + 1] {
                                    doc["switches"][j].as_object_mut().unwrap().remove("cross_link_peer");
                                }
                            }
                            if orphan_mask & (1 << k) != 0 {
                                // S{k}b reaches the network over copper only.
                                let id = format!("S{k}b");
                                uplinks.retain(|u| u["target"]["switch"] != json!(id));
                            }
                        }
                        doc["uplinks"] = json!(uplinks);
                        let mut g = build_graph::<f64>(&plant_from(&doc)).map_err(|e| e.to_string())?;
                        if variant > 0 {
                            let ids: Vec<String> = g.edges.iter().map(|e| e.id.clone()).collect();
                            for id in ids {
                                g.set_cost(&id, rng.gen_range(1..=3) as f64).map_err(|e| e.to_string())?;
                            }
                        }
                        ensure!(g.nodes.len() <= 7, "generated {} nodes", g.nodes.len());
                        let t = spanning_tree(&g);
                        if t.roots.len() != 1 {
                            continue;
                        }
                        if let Some(v) = stp_violation(&g, &t) {
                            return Err(format!("{v} in {doc}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    ensure!(checked > 0, "no connected graph generated");
    Ok(format!("{checked} connected graphs, 0 mismatches"))
}

fn poe() -> Outcome {
    let m = PowerModel::<Exact>::default();
    let w = |inj: i64, half_m: i64| {
        delivered_power(Exact::from_integer(inj), Exact::new(half_m, 2), PoeClass::Bt, &m)
            .map_err(|e| e.to_string())
    };
    ensure!(w(90, 200)? == Exact::from_integer(70), "90 W over 100 m gives {}", w(90, 200)?);
    ensure!(w(90, 0)? == Exact::from_integer(90), "90 W over 0 m gives {}", w(90, 0)?);
    for inj in [15, 30, 60, 90] {
        let mut prev = w(inj, 0)?;
        for half_m in 1..=200 {
            let cur = w(inj, half_m)?;
            ensure!(cur <= prev, "{inj} W rises at {} m", half_m as f64 / 2.0);
            prev = cur;
        }
    }
    Ok("90 W -> 70 W at 100 m, 90 W at 0 m, non-increasing over 0-100 m".into())
}

fn cost_sensitivity() -> Outcome {
    let plant: ExactPlant = plant_from(&fleet_doc(800, "micro4", None));
    ensure!(plant.switches.len() == 800, "fleet has {}", plant.switches.len());
    let d = sensitivity(&plant, &CostModel::default(), PriceKey::MicroSwitch, Exact::from_integer(25));
    ensure!(d == Exact::from_integer(20_000), "delta {d}");
    Ok("800 switches x +25 EUR = +20000 EUR".into())
}

fn labels() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let symbols: Vec<char> = ('0'..='9').chain('A'..='Z').collect();
    for i in 0..10_000 {
        let dir = if rng.gen_bool(0.5) { Direction::Outbound } else { Direction::Return };
        let r = FiberRef::new(dir, symbols[rng.gen_range(0..symbols.len())], rng.gen_range(0..12), rng.gen_range(0..12))
            .map_err(|e| e.to_string())?;
        ensure!(FiberRef::parse(&r.encode()).ok() == Some(r), "fiber ref {i} {}", r.encode());
        let suffix = [PortSuffix::Duplex, PortSuffix::SimplexA, PortSuffix::SimplexB][rng.gen_range(0..3)];
        let l = BoxPortLabel::new(rng.gen_range(0..10), rng.gen_range(0..100), rng.gen_range(1..=6), suffix)
            .map_err(|e| e.to_string())?;
        ensure!(BoxPortLabel::parse(&l.encode()).ok() == Some(l), "box label {i} {}", l.encode());
    }
    let tables: [(ColorScheme, [&str; 12]); 3] = [
        (ColorScheme::Fotag, ["Bleu", "Orange", "Vert", "Marron", "Gris", "Blanc", "Rouge", "Noir", "Jaune", "Violet", "Rose", "Turquoise"]),
        (ColorScheme::Alphabetic, ["Blanc", "Bleu", "Gris", "Jaune", "Marron", "Noir", "Orange", "Rose", "Rouge", "Turquoise", "Vert", "Violet"]),
        (ColorScheme::FranceTelecom, ["Rouge", "Bleu", "Vert", "Jaune", "Violet", "Blanc", "Orange", "Gris", "Marron", "Noir", "Turquoise", "Rose"]),
    ];
    for (scheme, expected) in tables {
        for (i, name) in expected.iter().enumerate() {
            let row = i as u32 + 1;
            let got = scheme.color_of(row).map_err(|e| e.to_string())?;
            ensure!(got == *name, "{scheme:?} row {row}: {got} != {name}");
            ensure!(scheme.index_of(name).ok() == Some(row), "{scheme:?} {name} does not map back");
        }
        let distinct: BTreeSet<&str> = expected.iter().copied().collect();
        ensure!(distinct.len() == 12, "{scheme:?} repeats a color");
    }
    Ok("20000 round-trips, 3 color tables x 12 rows".into())
}

fn determinism() -> Outcome {
    let invocations = cli_invocations();
    let mut files = 0;
    for inv in &invocations {
        let first = run_in_fresh_dir(inv);
        ensure!(first.0 == 0, "{} exited {}", inv.join(" "), first.0);
        let second = run_in_fresh_dir(inv);
        ensure!(first == second, "{} differs between runs", inv.join(" "));
        files += first.2.len();
    }
    Ok(format!("{} invocations, {files} files byte-identical", invocations.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("LEGI-scale arithmetic", legi_arithmetic),
        ("12x12 reference loop", reference_loop),
        ("tube-reuse invariant", tube_reuse),
        ("copper cross-link redundancy", redundancy),
        ("spanning-tree oracle", stp_oracle),
        ("PoE derating", poe),
        ("cost sensitivity", cost_sensitivity),
        ("label round-trips and color tables", labels),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

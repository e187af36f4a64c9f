#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use ftto::failsim::LogicalGraph;
use ftto::plant::{load_plant_str, FiberPlant, Side};
use ftto::Scalar;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

pub fn site_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("sites").join(name)
}

pub fn site_text(name: &str) -> String {
    std::fs::read_to_string(site_path(name)).expect("golden site readable")
}

pub fn site<S: Scalar>(name: &str) -> FiberPlant<S> {
    load_plant_str(&site_text(name)).expect("golden site loads")
}

pub fn plant_from<S: Scalar>(doc: &Value) -> FiberPlant<S> {
    load_plant_str(&doc.to_string()).expect("test plant loads")
}

/// One loop, one core, boxes at the given chainages, no taps.
pub fn loop_doc(length: u32, tubes: u32, fibers: u32, chainages: &[u32]) -> Value {
    let boxes: Vec<Value> = chainages
        .iter()
        .enumerate()
        .map(|(i, c)| json!({"id": format!("b{}", i + 1), "cable": "L1", "chainage_m": c}))
        .collect();
    json!({
        "schema_version": "1",
        "site": {"name": "t"},
        "loops": [{"id": "L1", "length_m": length, "tube_count": tubes,
                   "fibers_per_tube": fibers, "end_a_core": "core"}],
        "cores": [{"id": "core", "sfp_port_count": 1000}],
        "boxes": boxes,
    })
}

/// Brute-force overlap of the live segments `[0, pa)` and `(pb, L]` on
/// integer chainages, probing every half meter.
pub fn segments_overlap(pa: f64, pb: f64, length: f64) -> bool {
    let steps = (length * 2.0) as i64;
    (0..=steps).any(|k| {
        let x = k as f64 / 2.0;
        x < pa && x > pb && x <= length
    })
}

/// Checks every tap rule on a plant by pairwise comparison. Returns a
/// description of the first violation.
pub fn tap_violation<S: Scalar>(plant: &FiberPlant<S>) -> Option<String> {
    let taps: Vec<_> = plant.taps().collect();
    for (i, (ba, ta)) in taps.iter().enumerate() {
        for (bb, tb) in taps.iter().skip(i + 1) {
            if ta.cable != tb.cable || ta.tube != tb.tube {
                continue;
            }
            if ta.side == tb.side {
                return Some(format!("two taps on {}", ta.tap_ref()));
            }
            let (a, b) = if ta.side == Side::TowardA { (ba, bb) } else { (bb, ba) };
            let length = plant.cable(&ta.cable).unwrap().length_m.to_document();
            if segments_overlap(a.chainage_m.to_document(), b.chainage_m.to_document(), length) {
                return Some(format!(
                    "tube {}:{} live segments overlap ({} > {})",
                    ta.cable, ta.tube, a.id, b.id
                ));
            }
            if a.id == b.id && !plant.allow_same_box_double_tap {
                return Some(format!("same-box double tap at {}", a.id));
            }
        }
    }
    let mut used = BTreeSet::new();
    for u in &plant.uplinks {
        for f in &u.fibers {
            if !used.insert((u.tap.clone(), *f)) {
                return Some(format!("fiber {f} of {} used twice", u.tap));
            }
        }
    }
    None
}

/// Union-find reachability to any live core over enabled edges.
pub fn reachable_oracle<S: Scalar>(g: &LogicalGraph<S>) -> BTreeSet<String> {
    let ids: Vec<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
    let idx: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let alive = |id: &str| g.node(id).is_some_and(|n| n.alive);
    for e in &g.edges {
        if e.enabled && alive(&e.a) && alive(&e.b) {
            let (x, y) = (find(&mut parent, idx[e.a.as_str()]), find(&mut parent, idx[e.b.as_str()]));
            parent[x] = y;
        }
    }
    let core_roots: BTreeSet<usize> = g
        .nodes
        .iter()
        .filter(|n| n.alive && n.kind == ftto::failsim::NodeKind::Core)
        .map(|n| find(&mut parent, idx[n.id.as_str()]))
        .collect();
    g.nodes
        .iter()
        .filter(|n| n.alive && core_roots.contains(&find(&mut parent, idx[n.id.as_str()])))
        .map(|n| n.id.clone())
        .collect()
}

/// Minimal root path cost from every node by enumerating simple paths.
pub fn brute_root_costs(
    nodes: &[String],
    edges: &[(String, String, String, u64)],
    root: &str,
) -> BTreeMap<String, u64> {
    let mut best = BTreeMap::new();
    fn walk(
        at: &str,
        cost: u64,
        visited: &mut Vec<String>,
        edges: &[(String, String, String, u64)],
        best: &mut BTreeMap<String, u64>,
    ) {
        let e = best.entry(at.to_string()).or_insert(u64::MAX);
        if cost < *e {
            *e = cost;
        }
        for (_, a, b, c) in edges {
            let next = if a == at {
                b
            } else if b == at {
                a
            } else {
                continue;
            };
            if visited.iter().any(|v| v == next) {
                continue;
            }
            visited.push(next.clone());
            walk(next, cost + c, visited, edges, best);
            visited.pop();
        }
    }
    let _ = nodes;
    walk(root, 0, &mut vec![root.to_string()], edges, &mut best);
    best
}

/// Random generator for loop plants with integer chainages.
pub struct PlantGen {
    pub rng: StdRng,
}

impl PlantGen {
    pub fn new(seed: u64) -> Self {
        PlantGen {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    /// Strictly increasing integer chainages inside (0, length).
    pub fn chainages(&mut self, length: u32, n: usize) -> Vec<u32> {
        let mut picks = BTreeSet::new();
        while picks.len() < n {
            picks.insert(self.rng.gen_range(1..length));
        }
        picks.into_iter().collect()
    }

    /// Loop with ≤ `max_tubes` tubes and ≤ `max_boxes` boxes, some boxes
    /// already carrying valid taps.
    pub fn loop_plant(&mut self, max_tubes: u32, max_boxes: usize, same_box: bool) -> Value {
        let length = self.rng.gen_range(20..400);
        let tubes = self.rng.gen_range(1..=max_tubes);
        let fibers = [2, 4, 6, 12][self.rng.gen_range(0..4)];
        let nboxes = self.rng.gen_range(1..=max_boxes).min(length as usize - 1);
        let chain = self.chainages(length, nboxes);
        let mut doc = loop_doc(length, tubes, fibers, &chain);
        doc["site"]["allow_same_box_double_tap"] = json!(same_box);
        // Pre-existing taps that respect the ordering rule.
        for tube in 1..=tubes {
            if self.rng.gen_bool(0.3) {
                let i = self.rng.gen_range(0..nboxes);
                let j = self.rng.gen_range(i..nboxes);
                if self.rng.gen_bool(0.5) {
                    push_tap(&mut doc, i, tube, "toward_a");
                }
                if (j != i || same_box) && self.rng.gen_bool(0.5) {
                    push_tap(&mut doc, j, tube, "toward_b");
                }
            }
        }
        doc
    }

    /// Demand of up to `max_per_box` requests per box.
    pub fn demand(&mut self, plant: &Value, max_per_box: usize) -> Value {
        let boxes = plant["boxes"].as_array().unwrap();
        let mut demands = Vec::new();
        for b in boxes {
            if !self.rng.gen_bool(0.8) {
                continue;
            }
            let n = self.rng.gen_range(0..=max_per_box);
            let ups: Vec<Value> = (0..n)
                .map(|_| {
                    let mode = if self.rng.gen_bool(0.7) { "duplex" } else { "simplex" };
                    json!({"mode": mode, "kind": "micro4"})
                })
                .collect();
            demands.push(json!({"box": b["id"], "uplinks": ups}));
        }
        json!({"schema_version": "1", "demands": demands})
    }
}

pub fn push_tap(doc: &mut Value, box_index: usize, tube: u32, side: &str) {
    let taps = doc["boxes"][box_index]
        .as_object_mut()
        .unwrap()
        .entry("taps")
        .or_insert_with(|| json!([]));
    taps.as_array_mut()
        .unwrap()
        .push(json!({"tube": tube, "side": side}));
}

/// Loop plant where each pair `k` has switch `S{k}a` fed TowardA from the
/// lower-chainage box and `S{k}b` fed TowardB from the higher one, both on
/// tube `k + 1`. Pairs are copper cross-linked when `copper` is set. With
/// `dual_core` the B end lands on a second core.
pub fn pair_plant(rng: &mut StdRng, pairs: usize, copper: bool, dual_core: bool) -> Value {
    let length: u32 = rng.gen_range(4 * pairs as u32 + 4..500);
    let mut gen = PlantGen {
        rng: StdRng::seed_from_u64(rng.gen()),
    };
    let chain = gen.chainages(length, 2 * pairs);
    let mut slots: Vec<usize> = (0..2 * pairs).collect();
    use rand::seq::SliceRandom;
    slots.shuffle(rng);
    let mut doc = loop_doc(length, pairs as u32, 2, &chain);
    let core_b = if dual_core { "core2" } else { "core" };
    if dual_core {
        doc["loops"][0]["end_b_core"] = json!("core2");
        doc["cores"] = json!([
            {"id": "core", "sfp_port_count": 100, "bridge_priority": rng.gen_range(0..3) * 4096},
            {"id": "core2", "sfp_port_count": 100, "bridge_priority": rng.gen_range(0..3) * 4096}
        ]);
        doc["site"]["core_interconnect"] = json!(rng.gen_bool(0.5));
    }
    let mut switches = Vec::new();
    let mut offices = Vec::new();
    let mut uplinks = Vec::new();
    for k in 0..pairs {
        let (lo, hi) = {
            let (x, y) = (slots[2 * k], slots[2 * k + 1]);
            (x.min(y), x.max(y))
        };
        let tube = k as u32 + 1;
        push_tap(&mut doc, lo, tube, "toward_a");
        push_tap(&mut doc, hi, tube, "toward_b");
        for (suffix, bx, side, core, peer) in [
            ("a", lo, "toward_a", "core", "b"),
            ("b", hi, "toward_b", core_b, "a"),
        ] {
            let id = format!("S{k}{suffix}");
            let mut sw = json!({"id": id, "kind": "micro4", "office": format!("o{k}{suffix}"),
                "box": format!("b{}", bx + 1)});
            if copper {
                sw["cross_link_peer"] = json!(format!("S{k}{peer}"));
            }
            switches.push(sw);
            offices.push(json!({"id": format!("o{k}{suffix}"), "room": format!("r{k}{suffix}")}));
            uplinks.push(json!({"mode": "duplex", "cable": "L1", "tube": tube, "side": side,
                "fibers": [1, 2], "core": core, "core_port": 2 * k + (suffix == "b") as usize,
                "target": {"switch": id}}));
        }
    }
    doc["switches"] = json!(switches);
    doc["offices"] = json!(offices);
    doc["uplinks"] = json!(uplinks);
    doc
}

/// Checks a spanning tree against brute-force root path costs, the
/// documented tie-break and the tree structure. Edge costs must be integers.
pub fn stp_violation(g: &LogicalGraph<f64>, t: &ftto::failsim::SpanningTree<f64>) -> Option<String> {
    use ftto::failsim::NodeKind;
    let alive: BTreeSet<&str> = g.nodes.iter().filter(|n| n.alive).map(|n| n.id.as_str()).collect();
    let usable: Vec<(String, String, String, u64)> = g
        .edges
        .iter()
        .filter(|e| e.enabled && alive.contains(e.a.as_str()) && alive.contains(e.b.as_str()))
        .map(|e| (e.id.clone(), e.a.clone(), e.b.clone(), e.cost as u64))
        .collect();
    let names: Vec<String> = alive.iter().map(|s| s.to_string()).collect();

    let mut remaining: BTreeSet<&str> = alive.clone();
    let mut expected_roots = Vec::new();
    let mut tree_edges = 0usize;
    while let Some(&start) = remaining.iter().next() {
        let reach = brute_root_costs(&names, &usable, start);
        let comp: Vec<&str> = reach.keys().map(|k| alive.get(k.as_str()).copied().unwrap()).collect();
        for n in &comp {
            remaining.remove(n);
        }
        let rank = |id: &str| {
            let n = g.node(id).unwrap();
            (n.kind != NodeKind::Core, n.priority, id.to_string())
        };
        let root = comp.iter().min_by_key(|id| rank(id)).unwrap().to_string();
        expected_roots.push(rank(&root));
        let dist = brute_root_costs(&names, &usable, &root);
        tree_edges += comp.len() - 1;
        for &n in &comp {
            if n == root {
                if t.parent.contains_key(n) {
                    return Some(format!("root {n} has a parent"));
                }
                continue;
            }
            let best = usable
                .iter()
                .filter(|(_, a, b, _)| a == n || b == n)
                .map(|(id, a, b, c)| {
                    let nb = if a == n { b } else { a };
                    (dist[nb] + c, nb.clone(), id.clone())
                })
                .min()
                .unwrap();
            match t.parent.get(n) {
                Some((p, e, cost)) if *p == best.1 && *e == best.2 && *cost as u64 == best.0 => {}
                other => return Some(format!("{n}: expected {best:?}, got {other:?}")),
            }
        }
    }
    expected_roots.sort();
    let roots: Vec<String> = expected_roots.into_iter().map(|r| r.2).collect();
    if roots != t.roots {
        return Some(format!("roots {:?} != {:?}", t.roots, roots));
    }
    if t.active.len() != tree_edges {
        return Some(format!("{} active edges, expected {tree_edges}", t.active.len()));
    }
    // Acyclic: union-find over active edges never joins a set to itself.
    let mut parent: BTreeMap<&str, &str> = alive.iter().map(|n| (*n, *n)).collect();
    fn root_of<'a>(p: &BTreeMap<&'a str, &'a str>, mut x: &'a str) -> &'a str {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for (id, a, b, _) in &usable {
        if !t.active.contains(id) {
            if !t.blocking.contains(id) {
                return Some(format!("edge {id} neither active nor blocking"));
            }
            continue;
        }
        let (ra, rb) = (root_of(&parent, a), root_of(&parent, b));
        if ra == rb {
            return Some(format!("active edge {id} closes a cycle"));
        }
        parent.insert(ra, rb);
    }
    None
}

/// Plant with `n` switches of the given kind on one box, each in its own
/// office, with no uplinks. `model` names a switch model drawing 7 W.
pub fn fleet_doc(n: usize, kind: &str, model: Option<&str>) -> Value {
    let mut doc = loop_doc(300, 12, 12, &[100]);
    let switches: Vec<Value> = (0..n)
        .map(|i| {
            let mut s = json!({"id": format!("s{i:04}"), "kind": kind,
                "office": format!("o{i:04}"), "box": "b1"});
            if let Some(m) = model {
                s["model"] = json!(m);
            }
            s
        })
        .collect();
    let offices: Vec<Value> = (0..n)
        .map(|i| json!({"id": format!("o{i:04}"), "room": format!("r{i:04}")}))
        .collect();
    doc["switches"] = json!(switches);
    doc["offices"] = json!(offices);
    if let Some(m) = model {
        doc["models"] = json!({"switch_models": [{"name": m, "base_draw_w": 7}]});
    }
    doc
}

pub fn ftto(args: &[String]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_ftto"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Every command over the golden sites, in every output format.
pub fn cli_invocations() -> Vec<Vec<String>> {
    let s = |n: &str| site_path(n).display().to_string();
    let legi = s("legi.json");
    let desk = s("desk_redundancy.json");
    let mut out = vec![vec!["validate".into(), "--plant".into(), legi.clone()]];
    for demand in ["legi_demand.json", "legi_demand_simplex.json"] {
        for f in ["document", "records"] {
            out.push(vec![
                "plan".into(), "--plant".into(), legi.clone(), "--demand".into(), s(demand),
                "--format".into(), f.into(),
            ]);
        }
    }
    for (cmd, plant, formats) in [
        ("labels", &legi, &["records", "document"][..]),
        ("simulate", &legi, &["records", "document", "graph"][..]),
        ("report", &legi, &["records", "document"][..]),
        ("cost", &legi, &["records", "document"][..]),
    ] {
        for f in formats {
            out.push(vec![cmd.into(), "--plant".into(), plant.clone(), "--format".into(), f.to_string()]);
        }
    }
    for f in ["records", "document", "graph"] {
        out.push(vec![
            "whatif".into(), "--plant".into(), desk.clone(), "--scenario".into(),
            s("deadzone_cut.json"), "--format".into(), f.into(),
        ]);
    }
    out.push(vec![
        "labels".into(), "--plant".into(), legi, "--color-scheme".into(), "francetelecom".into(),
    ]);
    out
}

/// Contents of every file in `dir`, by name.
pub fn snapshot(dir: &std::path::Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

/// Runs `args` with a fresh output directory; returns status, stdout and files.
pub fn run_in_fresh_dir(args: &[String]) -> (i32, Vec<u8>, BTreeMap<String, Vec<u8>>) {
    let dir = tempfile::tempdir().unwrap();
    let mut full = args.to_vec();
    full.push("--out".into());
    full.push(dir.path().display().to_string());
    let out = ftto(&full);
    (out.status.code().unwrap_or(-1), out.stdout, snapshot(dir.path()))
}

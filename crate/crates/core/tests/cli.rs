mod common;

use common::{cli_invocations, ftto, run_in_fresh_dir, site_path};
use ftto::cli::strip_header;
use ftto::plant::{load_plant_str, validate_plant, Severity};
use ftto::Plant;

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn site(name: &str) -> String {
    site_path(name).display().to_string()
}

#[test]
fn validate_reports_panel_ports() {
    let out = ftto(&args(&["validate", "--plant", &site("legi.json")]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("432 panel ports"), "{text}");
    assert!(text.contains("0 errors"), "{text}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ftto(&args(&["validate"])).status.code(), Some(1));
    assert_eq!(ftto(&args(&["frobnicate"])).status.code(), Some(1));
    assert_eq!(ftto(&args(&["plan", "--plant", &site("legi.json")])).status.code(), Some(1));
    assert_eq!(
        ftto(&args(&["labels", "--plant", &site("legi.json"), "--format", "graph"])).status.code(),
        Some(1)
    );
}

#[test]
fn io_and_schema_errors() {
    let missing = ftto(&args(&["validate", "--plant", "/nonexistent/site.json"]));
    assert_eq!(missing.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": \"1\"").unwrap();
    let out = ftto(&args(&["validate", "--plant", &bad.display().to_string()]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_demand_exits_two() {
    let (status, _, files) = run_in_fresh_dir(&args(&[
        "plan",
        "--plant",
        &site("legi.json"),
        "--demand",
        &site("legi_infeasible_demand.json"),
    ]));
    assert_eq!(status, 2);
    assert!(files.is_empty());
}

#[test]
fn strict_reserve_flag_exits_two() {
    let (status, _, _) = run_in_fresh_dir(&args(&[
        "plan",
        "--plant",
        &site("legi.json"),
        "--demand",
        &site("legi_demand.json"),
        "--strict-reserve",
    ]));
    assert_eq!(status, 2);
}

#[test]
fn planned_plant_reloads_and_validates() {
    let (status, _, files) = run_in_fresh_dir(&args(&[
        "plan",
        "--plant",
        &site("legi.json"),
        "--demand",
        &site("legi_demand_simplex.json"),
    ]));
    assert_eq!(status, 0);
    let text = String::from_utf8(files["plant.json"].clone()).unwrap();
    assert!(text.starts_with("# ftto 0.1.0 plant"));
    let plant: Plant = load_plant_str(strip_header(&text)).unwrap();
    assert_eq!(plant.uplinks.len(), 432);
    assert!(validate_plant(&plant).iter().all(|v| v.severity != Severity::Error));
    assert!(files.contains_key("plan.json"));
}

#[test]
fn whatif_dead_zone() {
    let (status, _, files) = run_in_fresh_dir(&args(&[
        "whatif",
        "--plant",
        &site("desk_redundancy.json"),
        "--scenario",
        &site("deadzone_cut.json"),
    ]));
    assert_eq!(status, 0);
    let summary = String::from_utf8(files["whatif.txt"].clone()).unwrap();
    assert!(summary.contains("0 user ports lost"), "{summary}");
}

#[test]
fn every_command_succeeds_deterministically() {
    for inv in cli_invocations() {
        let first = run_in_fresh_dir(&inv);
        assert_eq!(first.0, 0, "{inv:?}");
        assert!(!first.2.is_empty() || inv[0] == "validate", "{inv:?}");
        for (name, bytes) in &first.2 {
            assert!(bytes.starts_with(b"# ftto 0.1.0 "), "{name} lacks header");
        }
        assert_eq!(first, run_in_fresh_dir(&inv), "{inv:?}");
    }
}

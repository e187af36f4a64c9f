//! Command-line front end.
//!
//! Every command reads documents, writes its outputs under `--out` and
//! returns an exit status: 0 success, 1 schema, invariant or usage error,
//! 2 capacity or reserve error, 3 I/O error. Only `validate` prints its
//! findings on standard output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::alloc::{
    allocate, convert_duplex_to_simplex, core_port_demand, demand_from_json, plan_to_json,
    reserve_report, AllocError, AllocationPlan,
};
use crate::estimate::{
    availability_report, cost_estimate, energy_report, power_budget, EstimateError,
};
use crate::failsim::{
    apply_scenario, build_graph, enumerate_single_failures, scenario_from_json, spanning_tree,
    to_dot, whatif, FailsimError,
};
use crate::labels::{label_sheets, ColorScheme};
use crate::plant::{
    assemble_plant, load_plant, parse_document, plant_to_json, validate_plant, FiberPlant,
    PlantError, Severity,
};
use crate::scalar::Fmt;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Records,
    Document,
    Graph,
}

#[derive(Debug, Parser)]
#[command(name = "ftto", version, about = "Fiber-to-the-office loop planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Site description document
    #[arg(long, global = true)]
    plant: Option<PathBuf>,
    /// Demand document
    #[arg(long, global = true)]
    demand: Option<PathBuf>,
    /// Failure scenario document
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Fiber color code: fotag, alphabetic or francetelecom (default: the site's own)
    #[arg(long = "color-scheme", global = true)]
    color_scheme: Option<ColorScheme>,
    /// Fail instead of warning when a plan drops below the reserve target
    #[arg(long = "strict-reserve", global = true)]
    strict_reserve: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Check a plant and print violations
    Validate,
    /// Allocate taps and uplinks for a demand
    Plan,
    /// Generate label sheets
    Labels,
    /// Evaluate every single failure
    Simulate,
    /// Evaluate one failure scenario
    Whatif,
    /// Energy, PoE, availability and reserve report
    Report,
    /// Cost estimate
    Cost,
}

/// A failed command: exit status and message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            status: 1,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            status: 3,
            message: format!("I/O error on {}: {e}", path.display()),
        }
    }
}

impl From<PlantError> for Failure {
    fn from(e: PlantError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<AllocError> for Failure {
    fn from(e: AllocError) -> Self {
        let status = match e {
            AllocError::Capacity(_) | AllocError::Reserve { .. } => 2,
            _ => 1,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

impl From<FailsimError> for Failure {
    fn from(e: FailsimError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<EstimateError> for Failure {
    fn from(e: EstimateError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return status;
        }
    };
    match dispatch(&cli) {
        Ok(status) => status,
        Err(f) => {
            eprintln!("{}", f.message);
            f.status
        }
    }
}

/// Drops a leading `#` header line written by this tool.
pub fn strip_header(text: &str) -> &str {
    if text.starts_with('#') {
        text.split_once('\n').map_or("", |(_, rest)| rest)
    } else {
        text
    }
}

fn header(kind: &str) -> String {
    format!("# ftto {VERSION} {kind}\n")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    path.as_deref()
        .ok_or_else(|| Failure::usage(format!("missing required flag --{flag}")))
}

fn write_out(dir: &Path, name: &str, kind: &str, body: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let path = dir.join(name);
    let mut text = header(kind);
    text.push_str(body);
    fs::write(&path, text).map_err(|e| Failure::io(&path, e))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn csv_rows<I, R>(head: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(head).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 records")
}

fn load(cli: &Cli) -> Result<FiberPlant<f64>, Failure> {
    let text = read(required(&cli.plant, "plant")?)?;
    let doc = parse_document(strip_header(&text))?;
    let mut plant = load_plant::<f64>(&doc)?;
    if let Some(scheme) = cli.color_scheme {
        plant.color_scheme = scheme;
    }
    Ok(plant)
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Validate => validate(cli),
        Command::Plan => plan(cli),
        Command::Labels => labels(cli),
        Command::Simulate => simulate(cli),
        Command::Whatif => whatif_cmd(cli),
        Command::Report => report(cli),
        Command::Cost => cost(cli),
    }
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::usage(format!("format {f:?} is not available for this command")))
    }
}

fn validate(cli: &Cli) -> Result<i32, Failure> {
    let text = read(required(&cli.plant, "plant")?)?;
    let doc = parse_document(strip_header(&text))?;
    let plant = assemble_plant::<f64>(&doc)?;
    let violations = validate_plant(&plant);
    let errors = violations
        .iter()
        .filter(|v| v.severity == Severity::Error)
        .count();
    let mut out = String::new();
    for v in &violations {
        let _ = writeln!(out, "{v}");
    }
    let _ = writeln!(out, "{} panel ports", plant.panel_port_count());
    let _ = writeln!(
        out,
        "{errors} errors, {} warnings",
        violations.len() - errors
    );
    print!("{out}");
    Ok(if errors == 0 { 0 } else { 1 })
}

fn plan(cli: &Cli) -> Result<i32, Failure> {
    let format = format_or(cli, Format::Document, &[Format::Document, Format::Records])?;
    let plant = load(cli)?;
    let text = read(required(&cli.demand, "demand")?)?;
    let (mut demand, selection) = demand_from_json::<f64>(strip_header(&text))?;
    demand.strict_reserve |= cli.strict_reserve;
    let mut plan = allocate(&plant, &demand)?;
    let mut applied = plan.apply(&plant)?;
    if let Some(sel) = selection {
        let ids = sel.resolve(&applied);
        let conversion = convert_duplex_to_simplex(&applied, &ids)?;
        applied = conversion.apply(&applied)?;
        let allocated: std::collections::BTreeSet<_> =
            plan.uplinks.iter().map(|u| u.id.clone()).collect();
        let mut uplinks: Vec<_> = plan
            .uplinks
            .into_iter()
            .filter(|u| !conversion.removed_uplinks.contains(&u.id))
            .collect();
        uplinks.extend(conversion.uplinks);
        plan = AllocationPlan {
            taps: plan.taps,
            uplinks,
            removed_uplinks: conversion
                .removed_uplinks
                .into_iter()
                .filter(|id| !allocated.contains(id))
                .collect(),
            reserve: conversion.reserve,
        };
    }
    let errors: Vec<_> = validate_plant(&applied)
        .into_iter()
        .filter(|v| v.severity == Severity::Error)
        .collect();
    if let Some(v) = errors.first() {
        return Err(Failure::usage(format!("planned plant is invalid: {v}")));
    }
    match format {
        Format::Records => {
            let rows = plan.uplinks.iter().map(|u| {
                vec![
                    u.id.clone(),
                    format!("{:?}", u.mode).to_lowercase(),
                    u.tap.to_string(),
                    u.fibers
                        .iter()
                        .map(u32::to_string)
                        .collect::<Vec<_>>()
                        .join(";"),
                    format!("{}:{}", u.core_port.core, u.core_port.port),
                ]
            });
            let body = csv_rows(&["uplink", "mode", "tap", "fibers", "core_port"], rows);
            write_out(&cli.out, "plan.csv", "plan", &body)?;
        }
        _ => write_out(&cli.out, "plan.json", "plan", &plan_to_json(&plan))?,
    }
    write_out(&cli.out, "plant.json", "plant", &plant_to_json(&applied))?;
    let demand_summary = core_port_demand(&applied);
    eprintln!(
        "{} taps, {} uplinks, {} user ports",
        plan.taps.len(),
        applied.uplinks.len(),
        demand_summary.user_ports
    );
    Ok(0)
}

fn labels(cli: &Cli) -> Result<i32, Failure> {
    let format = format_or(cli, Format::Records, &[Format::Records, Format::Document])?;
    let plant = load(cli)?;
    let sheets = label_sheets(&plant);
    match format {
        Format::Records => {
            let files = sheets
                .to_csv()
                .map_err(|e| Failure::usage(e.to_string()))?;
            for (name, body) in files {
                write_out(&cli.out, &format!("labels_{name}.csv"), "labels", &body)?;
            }
        }
        _ => write_out(&cli.out, "labels.json", "labels", &sheets.to_json())?,
    }
    Ok(0)
}

fn simulate(cli: &Cli) -> Result<i32, Failure> {
    let format = format_or(
        cli,
        Format::Records,
        &[Format::Records, Format::Document, Format::Graph],
    )?;
    let plant = load(cli)?;
    match format {
        Format::Graph => {
            let graph = build_graph(&plant)?;
            let tree = spanning_tree(&graph);
            write_out(&cli.out, "topology.dot", "graph", &to_dot(&graph, Some(&tree)))?;
        }
        Format::Records => {
            let report = enumerate_single_failures(&plant)?;
            let body = report.to_csv().map_err(|e| Failure::usage(e.to_string()))?;
            write_out(&cli.out, "criticality.csv", "criticality", &body)?;
        }
        Format::Document => {
            let report = enumerate_single_failures(&plant)?;
            write_out(&cli.out, "criticality.json", "criticality", &json(&report))?;
        }
    }
    Ok(0)
}

fn whatif_cmd(cli: &Cli) -> Result<i32, Failure> {
    let format = format_or(
        cli,
        Format::Records,
        &[Format::Records, Format::Document, Format::Graph],
    )?;
    let plant = load(cli)?;
    let text = read(required(&cli.scenario, "scenario")?)?;
    let scenario = scenario_from_json::<f64>(strip_header(&text))?;
    let graph = build_graph(&plant)?;
    let report = whatif(&graph, &scenario)?;
    let summary = format!("{} user ports lost\n", report.lost_user_ports);
    match format {
        Format::Records => {
            let mut rows: Vec<Vec<String>> = report
                .switches
                .iter()
                .map(|(id, ok)| vec!["switch".into(), id.clone(), ok.to_string()])
                .collect();
            rows.extend(
                report
                    .offices
                    .iter()
                    .map(|(id, ok)| vec!["office".into(), id.clone(), ok.to_string()]),
            );
            let body = csv_rows(&["element", "id", "reachable"], rows);
            write_out(&cli.out, "whatif.csv", "whatif", &body)?;
        }
        Format::Document => write_out(&cli.out, "whatif.json", "whatif", &json(&report))?,
        Format::Graph => {
            let after = apply_scenario(&graph, &scenario)?;
            let tree = spanning_tree(&after);
            write_out(&cli.out, "whatif.dot", "graph", &to_dot(&after, Some(&tree)))?;
        }
    }
    write_out(&cli.out, "whatif.txt", "whatif", &summary)?;
    Ok(0)
}

#[derive(Serialize)]
struct ReportDoc {
    assumptions: Vec<String>,
    energy: EnergyDoc,
    availability: AvailabilityDoc,
    poe: Vec<PoeRow>,
    core_ports: CorePortsDoc,
    reserve: Vec<ReserveRow>,
}

#[derive(Serialize)]
struct EnergyDoc {
    base_draw_w: f64,
    transformer_overhead_w: f64,
    total_draw_w: f64,
    eepoe_savings_w: f64,
    night_savings_wh: f64,
}

#[derive(Serialize)]
struct AvailabilityDoc {
    fleet_size: usize,
    expected_failures_per_year: f64,
    recommended_spares: u64,
}

#[derive(Serialize)]
struct PoeRow {
    switch: String,
    device: String,
    message: String,
}

#[derive(Serialize)]
struct CorePortsDoc {
    sfp_ports: usize,
    user_ports: u64,
    user_ports_per_sfp: f64,
}

#[derive(Serialize)]
struct ReserveRow {
    cable: String,
    tube_side_reserve: f64,
    fiber_reserve: f64,
    warning: bool,
}

fn report(cli: &Cli) -> Result<i32, Failure> {
    let format = format_or(cli, Format::Records, &[Format::Records, Format::Document])?;
    let plant = load(cli)?;
    let pm = &plant.power_model;
    let energy = energy_report(&plant)?;
    let availability = availability_report(&plant, &plant.mtbf);
    let poe: Vec<PoeRow> = plant
        .switches
        .iter()
        .flat_map(|s| power_budget(s, &s.poe_devices, pm))
        .map(|v| PoeRow {
            switch: v.switch,
            device: v.device.unwrap_or_default(),
            message: v.message,
        })
        .collect();
    let ports = core_port_demand(&plant);
    let assumptions = vec![
        format!(
            "bt delivered power falls {} W per m at full injection, quality x{}",
            Fmt(pm.bt_loss_w_per_m),
            Fmt(pm.quality_multiplier)
        ),
        format!(
            "per-switch PoE budget defaults to {} W",
            Fmt(pm.default_switch_poe_budget_w)
        ),
        format!(
            "EEPoE saves {} W per idle port",
            Fmt(pm.eepoe_saving_per_idle_port_w)
        ),
        format!(
            "transformer-fed switches draw {}x base",
            Fmt(pm.transformer_consumption_factor)
        ),
        format!("night shutdown lasts {} h", Fmt(pm.night_hours)),
        format!(
            "spares cover {} years of failures",
            Fmt(plant.mtbf.repair_turnaround_years)
        ),
    ];
    let doc = ReportDoc {
        assumptions,
        energy: EnergyDoc {
            base_draw_w: energy.base_draw_w,
            transformer_overhead_w: energy.transformer_overhead_w,
            total_draw_w: energy.total_draw_w,
            eepoe_savings_w: energy.eepoe_savings_w,
            night_savings_wh: energy.night_savings_wh,
        },
        availability: AvailabilityDoc {
            fleet_size: availability.fleet_size,
            expected_failures_per_year: availability.expected_failures_per_year,
            recommended_spares: availability.recommended_spares,
        },
        poe,
        core_ports: CorePortsDoc {
            sfp_ports: ports.sfp_ports,
            user_ports: ports.user_ports,
            user_ports_per_sfp: ports.user_ports_per_sfp,
        },
        reserve: reserve_report(&plant)
            .into_iter()
            .map(|r| ReserveRow {
                cable: r.cable,
                tube_side_reserve: r.tube_side_reserve,
                fiber_reserve: r.fiber_reserve,
                warning: r.warning,
            })
            .collect(),
    };
    match format {
        Format::Records => {
            let f = |v: f64| Fmt(v).to_string();
            let summary = csv_rows(
                &["quantity", "value"],
                [
                    vec!["base_draw_w".to_string(), f(doc.energy.base_draw_w)],
                    vec!["transformer_overhead_w".into(), f(doc.energy.transformer_overhead_w)],
                    vec!["total_draw_w".into(), f(doc.energy.total_draw_w)],
                    vec!["eepoe_savings_w".into(), f(doc.energy.eepoe_savings_w)],
                    vec!["night_savings_wh".into(), f(doc.energy.night_savings_wh)],
                    vec!["fleet_size".into(), doc.availability.fleet_size.to_string()],
                    vec![
                        "expected_failures_per_year".into(),
                        f(doc.availability.expected_failures_per_year),
                    ],
                    vec![
                        "recommended_spares".into(),
                        doc.availability.recommended_spares.to_string(),
                    ],
                    vec!["sfp_ports".into(), doc.core_ports.sfp_ports.to_string()],
                    vec!["user_ports".into(), doc.core_ports.user_ports.to_string()],
                    vec!["user_ports_per_sfp".into(), f(doc.core_ports.user_ports_per_sfp)],
                ],
            );
            write_out(&cli.out, "report_summary.csv", "report", &summary)?;
            let energy_rows = energy.rows.iter().map(|r| {
                vec![
                    r.switch.clone(),
                    f(r.base_draw_w),
                    f(r.draw_w),
                    f(r.eepoe_saving_w),
                    f(r.night_saving_wh),
                ]
            });
            let body = csv_rows(
                &["switch", "base_draw_w", "draw_w", "eepoe_saving_w", "night_saving_wh"],
                energy_rows,
            );
            write_out(&cli.out, "report_energy.csv", "report", &body)?;
            let body = csv_rows(
                &["switch", "device", "message"],
                doc.poe
                    .iter()
                    .map(|p| [p.switch.clone(), p.device.clone(), p.message.clone()]),
            );
            write_out(&cli.out, "report_poe.csv", "report", &body)?;
            let body = csv_rows(
                &["cable", "tube_side_reserve", "fiber_reserve", "warning"],
                doc.reserve.iter().map(|r| {
                    [
                        r.cable.clone(),
                        f(r.tube_side_reserve),
                        f(r.fiber_reserve),
                        r.warning.to_string(),
                    ]
                }),
            );
            write_out(&cli.out, "report_reserve.csv", "report", &body)?;
            let body = csv_rows(&["assumption"], doc.assumptions.iter().map(|a| [a.as_str()]));
            write_out(&cli.out, "report_assumptions.csv", "report", &body)?;
        }
        _ => write_out(&cli.out, "report.json", "report", &json(&doc))?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct CostRow {
    item: String,
    description: String,
    quantity: f64,
    unit_price: f64,
    amount: f64,
}

#[derive(Serialize)]
struct CostDoc {
    assumptions: Vec<String>,
    items: Vec<CostRow>,
    total: f64,
}

fn cost(cli: &Cli) -> Result<i32, Failure> {
    let format = format_or(cli, Format::Records, &[Format::Records, Format::Document])?;
    let plant = load(cli)?;
    let estimate = cost_estimate(&plant, &plant.cost_model);
    let doc = CostDoc {
        assumptions: estimate.assumptions.clone(),
        items: estimate
            .items
            .iter()
            .map(|i| CostRow {
                item: i.key.to_string(),
                description: i.description.to_string(),
                quantity: i.quantity,
                unit_price: i.unit_price,
                amount: i.amount,
            })
            .collect(),
        total: estimate.total,
    };
    match format {
        Format::Records => {
            let f = |v: f64| Fmt(v).to_string();
            let mut rows: Vec<Vec<String>> = doc
                .items
                .iter()
                .map(|i| {
                    vec![
                        i.item.clone(),
                        i.description.clone(),
                        f(i.quantity),
                        f(i.unit_price),
                        f(i.amount),
                    ]
                })
                .collect();
            rows.push(vec![
                "total".into(),
                String::new(),
                String::new(),
                String::new(),
                f(doc.total),
            ]);
            // d(total)/d(unit price) is the quantity of that item.
            let body = csv_rows(
                &["item", "description", "quantity", "unit_price", "amount"],
                rows,
            );
            write_out(&cli.out, "cost.csv", "cost", &body)?;
            let body = csv_rows(&["assumption"], doc.assumptions.iter().map(|a| [a.as_str()]));
            write_out(&cli.out, "cost_assumptions.csv", "cost", &body)?;
        }
        _ => write_out(&cli.out, "cost.json", "cost", &json(&doc))?,
    }
    Ok(0)
}

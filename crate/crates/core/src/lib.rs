//! Planning, labeling and failure analysis for fiber-to-the-office networks
//! built on optical loops.
//!
//! Every fiber of a loop cable leaves the core room and comes back to it, so
//! each tube can be cut once toward each end and feed two breakout boxes.
//! This crate models such plants ([`plant`]), places taps and uplinks on
//! them ([`alloc`]), prints panel, box and switch labels ([`labels`]),
//! simulates failures against a spanning-tree view of the network
//! ([`failsim`]) and rolls up cost, PoE and energy figures ([`estimate`]).
//!
//! The model is generic over [`Scalar`]: `f64`, `f32` or the exact
//! `Ratio<i64>`. The aliases below fix the common choices.
//!
//! ```
//! use ftto::Plant;
//!
//! let text = r#"{
//!   "schema_version": "1",
//!   "site": {"name": "demo"},
//!   "loops": [{"id": "L1", "length_m": 300, "tube_count": 12,
//!              "fibers_per_tube": 12, "end_a_core": "core"}],
//!   "cores": [{"id": "core", "sfp_port_count": 48}]
//! }"#;
//! let plant: Plant = ftto::plant::load_plant_str(text).unwrap();
//! assert_eq!(plant.panel_port_count(), 288);
//! ```

pub mod alloc;
pub mod cli;
pub mod estimate;
pub mod failsim;
pub mod labels;
pub mod plant;
pub mod scalar;

pub use scalar::Scalar;

use num_rational::Ratio;

/// Exact rational scalar.
pub type Exact = Ratio<i64>;

pub type Plant = plant::FiberPlant<f64>;
pub type PlantF32 = plant::FiberPlant<f32>;
pub type ExactPlant = plant::FiberPlant<Exact>;

pub type Plan = alloc::AllocationPlan<f64>;
pub type ExactPlan = alloc::AllocationPlan<Exact>;
pub type Demand = alloc::DemandSpec<f64>;

pub type Graph = failsim::LogicalGraph<f64>;
pub type ExactGraph = failsim::LogicalGraph<Exact>;
pub type Scenario = failsim::FailureScenario<f64>;

pub type Costs = estimate::CostModel<f64>;
pub type Power = estimate::PowerModel<f64>;

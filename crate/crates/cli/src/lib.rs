//! Scenario runner and exporters built on the `wulffgrid` library.
//!
//! A scenario is one JSON document:
//!
//! ```json
//! {"version": 1, "name": "square", "kind": "crystal-converge", "seed": 1,
//!  "inputs": {...}, "tolerances": {...}, "output": "square"}
//! ```
//!
//! Inputs that name other JSON files resolve relative to the scenario file.

pub mod commands;
pub mod config;
mod error;
pub mod export;
pub mod run;

pub use config::{Kind, Scenario};
pub use error::CliError;
pub use run::{run_scenario, Check, Report};

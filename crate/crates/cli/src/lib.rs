//! Scenario-driven front end for the boundary gradient observer toolkit.
//!
//! Scenarios are TOML files (see [`config::ScenarioConfig`]); [`commands`] runs the rank check,
//! coupled simulation, placement sweeps and the neutral-mode example and writes CSV/TOML outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{Outcome, Overrides};
pub use config::ScenarioConfig;
pub use error::{CliError, Result};

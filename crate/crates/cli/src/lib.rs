//! Scenario-driven front end for varqd: config parsing, runs, certificates
//! and comparison tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod snapshot;

pub use config::{Kind, Scenario};
pub use error::{CliError, Result};

//! Experiment runner for `fpl-core`: prime cache files, parallel drivers,
//! run configuration, JSON and CSV artifacts, and the `fpl` command line.

pub mod cache;
pub mod cli;
pub mod commands;
pub mod config;
pub mod drivers;
pub mod error;
pub mod output;
pub mod record;

pub use error::{FplError, Result};

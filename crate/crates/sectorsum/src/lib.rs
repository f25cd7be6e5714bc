//! Experiment driver for `sectorsum-core`: JSON configs, the `run` suites,
//! per-module subcommands and CSV/JSON output.

// `!(x > 0.0)` style guards reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod commands;
pub mod config;
pub mod error;
pub mod model;
pub mod report;
pub mod suites;

pub use error::CliError;

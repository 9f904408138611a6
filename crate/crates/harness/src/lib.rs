//! Experiment harness behind the `kchase` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod run;
pub mod stats;

pub use error::{HarnessError, Result};
pub use run::{run, Subcommand};

//! Simulation library for k-chasing of convex functions and top-k action
//! online learning.
//!
//! The crate holds the online algorithms (double coverage on the line, the
//! work function algorithm, the randomized k-median filter and its
//! well-sharpened extension, Hedge and follow-the-leader over k-tuples), the
//! lower-bound instance generators, and exact offline oracles used to
//! measure competitive ratios and regret.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::too_many_arguments,
    clippy::needless_range_loop
)]

pub mod adversary;
pub mod config;
pub mod error;
pub mod instances;
pub mod kmedian;
pub mod kserver;
pub mod ledger;
pub mod line_chaser;
pub mod metric;
pub mod online;
pub mod oracles;
pub mod regret;
pub mod request;
pub mod seed;
pub mod wellsharp;

pub use config::{match_cost, pairwise_spread, serve_cost, Configuration};
pub use error::{Error, Result};
pub use ledger::{CostLedger, Trajectory};
pub use metric::{Euclidean, FiniteMetric, Line, Metric};
pub use request::{CostFunction, LineRequest};
pub use seed::SeedTree;

//! Cost accounting and run trajectories.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::Metric;

/// Running service and movement totals with the per-step breakdown.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    service_total: f64,
    movement_total: f64,
    per_step: Vec<(f64, f64)>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one step. Infinite service is refused: an algorithm has to
    /// move into a body before it can be charged.
    pub fn record(&mut self, service: f64, movement: f64) -> Result<()> {
        if service.is_infinite() || movement.is_infinite() {
            return Err(Error::InfiniteCost);
        }
        if !(service >= 0.0 && movement >= 0.0) {
            return invalid(format!("negative or NaN cost ({service}, {movement})"));
        }
        self.service_total += service;
        self.movement_total += movement;
        self.per_step.push((service, movement));
        Ok(())
    }

    pub fn service_total(&self) -> f64 {
        self.service_total
    }

    pub fn movement_total(&self) -> f64 {
        self.movement_total
    }

    pub fn total(&self) -> f64 {
        self.service_total + self.movement_total
    }

    pub fn per_step(&self) -> &[(f64, f64)] {
        &self.per_step
    }

    pub fn len(&self) -> usize {
        self.per_step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_step.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep<P> {
    pub pre: Vec<P>,
    pub post: Vec<P>,
    pub service: f64,
    pub movement: f64,
}

/// The full record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<P> {
    pub steps: Vec<TrajectoryStep<P>>,
}

impl<P> Default for Trajectory<P> {
    fn default() -> Self {
        Self { steps: Vec::new() }
    }
}

impl<P: Clone> Trajectory<P> {
    pub fn push(&mut self, pre: &[P], post: &[P], service: f64, movement: f64) {
        self.steps.push(TrajectoryStep {
            pre: pre.to_vec(),
            post: post.to_vec(),
            service,
            movement,
        });
    }

    pub fn service_total(&self) -> f64 {
        self.steps.iter().map(|s| s.service).sum()
    }

    pub fn movement_total(&self) -> f64 {
        self.steps.iter().map(|s| s.movement).sum()
    }

    pub fn total(&self) -> f64 {
        self.service_total() + self.movement_total()
    }

    /// One row per step: `step,service_cost,movement_cost,pos_0..pos_{k-1}`
    /// with post-move positions. Euclidean coordinates are joined by `;`.
    pub fn to_csv<M: Metric<Point = P>>(&self, metric: &M) -> String {
        let k = self.steps.first().map_or(0, |s| s.post.len());
        let mut out = String::from("step,service_cost,movement_cost");
        for i in 0..k {
            let _ = write!(out, ",pos_{i}");
        }
        out.push('\n');
        for (t, s) in self.steps.iter().enumerate() {
            let _ = write!(out, "{},{},{}", t + 1, s.service, s.movement);
            for p in &s.post {
                let _ = write!(out, ",{}", metric.format_point(p));
            }
            out.push('\n');
        }
        out
    }
}

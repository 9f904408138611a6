//! The common shape of an online chasing algorithm.

use serde::Serialize;

use crate::config::Configuration;
use crate::error::Result;
use crate::ledger::{CostLedger, Trajectory};
use crate::metric::Metric;

/// What one online step did.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord<P> {
    pub pre: Configuration<P>,
    pub post: Configuration<P>,
    pub service: f64,
    pub movement: f64,
}

pub trait Chaser<M: Metric, R: ?Sized> {
    fn configuration(&self) -> &Configuration<M::Point>;

    fn respond(&mut self, metric: &M, request: &R) -> Result<StepRecord<M::Point>>;
}

/// Feeds `requests` to `chaser`, charging every step to a ledger.
pub fn run_chaser<M, R, C>(
    chaser: &mut C,
    metric: &M,
    requests: &[R],
) -> Result<(CostLedger, Trajectory<M::Point>)>
where
    M: Metric,
    C: Chaser<M, R>,
{
    let mut ledger = CostLedger::new();
    let mut trajectory = Trajectory::default();
    for r in requests {
        let step = chaser.respond(metric, r)?;
        ledger.record(step.service, step.movement)?;
        trajectory.push(
            step.pre.positions(),
            step.post.positions(),
            step.service,
            step.movement,
        );
    }
    Ok((ledger, trajectory))
}

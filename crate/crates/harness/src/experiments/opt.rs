use serde::{Deserialize, Serialize};

use kchase::kserver::kserver_opt;
use kchase::oracles::{breakpoint_grid, candidate_grid, chasing_opt_line};
use kchase::{Configuration, FiniteMetric, Line, LineRequest};

use crate::error::Result;
use crate::report::{Artifact, Outcome};

/// An offline instance to solve exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptConfig {
    /// Convex requests on the line. Without `grid_step` the grid is the
    /// request breakpoints; with it, a lattice on `[lo, hi]` is merged in.
    Line {
        start: Vec<f64>,
        requests: Vec<LineRequest>,
        grid_step: Option<f64>,
        lo: Option<f64>,
        hi: Option<f64>,
    },
    /// Point requests on a finite metric.
    Kserver {
        metric: FiniteMetric,
        start: Vec<usize>,
        requests: Vec<usize>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct OptSummary {
    pub value: f64,
    pub grid_points: Option<usize>,
}

pub fn opt(cfg: &OptConfig) -> Result<(OptSummary, Vec<Artifact>)> {
    match cfg {
        OptConfig::Line {
            start,
            requests,
            grid_step,
            lo,
            hi,
        } => {
            let x0 = Configuration::new(&Line, start.clone())?;
            let grid = match grid_step {
                None => breakpoint_grid(requests, &x0),
                Some(h) => {
                    let lo = lo.unwrap_or(-10.0);
                    let hi = hi.unwrap_or(10.0);
                    candidate_grid(requests, &x0, lo, hi, *h)?
                }
            };
            let sol = chasing_opt_line(requests, &x0, &grid)?;
            Ok((
                OptSummary {
                    value: sol.value,
                    grid_points: Some(grid.len()),
                },
                vec![Artifact::new(
                    "trajectories/opt.csv",
                    sol.trajectory.to_csv(&Line),
                )],
            ))
        }
        OptConfig::Kserver {
            metric,
            start,
            requests,
        } => {
            let x0 = Configuration::new(metric, start.clone())?;
            for r in requests {
                kchase::Metric::validate_point(metric, r)?;
            }
            Ok((
                OptSummary {
                    value: kserver_opt(metric, requests, &x0)?,
                    grid_points: None,
                },
                Vec::new(),
            ))
        }
    }
}

pub fn opt_outcome(cfg: &OptConfig) -> Result<Outcome> {
    let (summary, artifacts) = opt(cfg)?;
    Ok(Outcome::new(
        Vec::new(),
        &Vec::<()>::new(),
        &summary,
        artifacts,
    ))
}

//! Double-coverage chasing of convex functions on the line, and the
//! potential function certifying its `4k` competitive ratio.
//!
//! On a request `f` with minimizer `m`:
//! * if a server sits at `m`, nothing moves;
//! * if `m` lies outside the hull of the servers, the nearest extreme server
//!   walks toward `m` while `f` at its current position exceeds the distance
//!   walked in this step;
//! * otherwise the two servers bracketing `m` walk toward it at the same
//!   rate while the smaller of their `f` values exceeds the total distance
//!   walked, stopping early if one of them reaches `m`.

use serde::{Deserialize, Serialize};

use crate::config::{match_cost, pairwise_spread, serve_cost, Configuration};
use crate::error::{invalid, Result};
use crate::metric::Line;
use crate::online::{Chaser, StepRecord};
use crate::request::{CostFunction, LineRequest};

const BISECTION_TOL: f64 = 1e-10;
pub const CERTIFICATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ReachedArgmin,
    CostBalance,
    AlreadyAtArgmin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaseStep {
    pub pre: Configuration<f64>,
    pub post: Configuration<f64>,
    /// Indices (into the sorted configuration) of the servers that moved.
    pub moved: Vec<usize>,
    pub stop_reason: StopReason,
    pub service: f64,
    pub movement: f64,
}

/// First `t` in `[0, t_max]` with `g(t) <= 0`, for `g` non-increasing.
/// `knots` are the interior points where `g` may change form; between them
/// `g` is linear when `linear` is set, otherwise the crossing is bisected.
fn first_crossing(g: impl Fn(f64) -> f64, knots: &[f64], t_max: f64, linear: bool) -> Option<f64> {
    let mut ts = vec![0.0];
    ts.extend(knots.iter().copied().filter(|&t| t > 0.0 && t < t_max));
    ts.push(t_max);
    ts.sort_by(f64::total_cmp);
    let gs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let i = gs.iter().position(|&v| v <= 0.0)?;
    if i == 0 {
        return Some(0.0);
    }
    let (t0, t1) = (ts[i - 1], ts[i]);
    let (g0, g1) = (gs[i - 1], gs[i]);
    if g0.is_infinite() {
        return Some(t1);
    }
    if linear {
        return Some((t0 + g0 * (t1 - t0) / (g0 - g1)).clamp(t0, t1));
    }
    let (mut lo, mut hi) = (t0, t1);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// One step of the line algorithm.
pub fn chase_step(x: &Configuration<f64>, f: &LineRequest) -> Result<ChaseStep> {
    let Some(m) = f.minimizer(&Line) else {
        return invalid("request has no finite minimizer");
    };
    let p = x.positions();
    let k = p.len();
    if p.contains(&m) {
        return Ok(ChaseStep {
            pre: x.clone(),
            post: x.clone(),
            moved: Vec::new(),
            stop_reason: StopReason::AlreadyAtArgmin,
            service: serve_cost(&Line, x, f),
            movement: 0.0,
        });
    }
    // (index, direction) of each moving server
    let movers: Vec<(usize, f64)> = if m < p[0] {
        vec![(0, -1.0)]
    } else if m > p[k - 1] {
        vec![(k - 1, 1.0)]
    } else {
        let i = p.iter().rposition(|&q| q < m).unwrap();
        vec![(i, 1.0), (i + 1, -1.0)]
    };
    let t_max = movers
        .iter()
        .map(|&(i, _)| (m - p[i]).abs())
        .fold(f64::INFINITY, f64::min);
    let rate = movers.len() as f64;

    let mut stop = t_max;
    for &(i, dir) in &movers {
        let start = p[i];
        let root = match f {
            LineRequest::Interval(body) => {
                let (a, b) = body.bounds();
                Some(if start < a {
                    a - start
                } else if start > b {
                    start - b
                } else {
                    0.0
                })
            }
            _ => {
                let knots: Vec<f64> = f.knots().iter().map(|&kx| (kx - start) * dir).collect();
                first_crossing(
                    |t| f.value(&Line, &(start + dir * t)) - rate * t,
                    &knots,
                    t_max,
                    f.is_piecewise_linear(),
                )
            }
        };
        if let Some(t) = root {
            stop = stop.min(t);
        }
    }

    let reached = stop >= t_max;
    let mut post = p.to_vec();
    for &(i, dir) in &movers {
        post[i] = if reached && (m - p[i]).abs() == t_max {
            m
        } else {
            p[i] + dir * stop
        };
    }
    let post = Configuration::new(&Line, post)?;
    let movement = match_cost(&Line, x, &post)?;
    let stop_reason = if reached {
        StopReason::ReachedArgmin
    } else {
        StopReason::CostBalance
    };
    let moved = if movement > 0.0 {
        movers.iter().map(|&(i, _)| i).collect()
    } else {
        Vec::new()
    };
    Ok(ChaseStep {
        pre: x.clone(),
        service: serve_cost(&Line, &post, f),
        post,
        moved,
        stop_reason,
        movement,
    })
}

/// The potential `2k * match(X, Y) + 2 * spread(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialState {
    pub phi: f64,
}

pub fn potential(x: &Configuration<f64>, y: &Configuration<f64>) -> Result<PotentialState> {
    let k = x.k() as f64;
    Ok(PotentialState {
        phi: 2.0 * k * match_cost(&Line, x, y)? + 2.0 * pairwise_spread(&Line, x),
    })
}

/// Amortized-cost inequality for one step, the algorithm moving
/// `x -> x_post` and an adversary moving `y -> y_post` on request `f`:
///
/// `phi(x_post, y_post) - phi(x, y) <= 4k (match(y, y_post) + serve(y_post, f))
///                                     - (match(x, x_post) + serve(x_post, f))`
pub fn certify_step(
    x: &Configuration<f64>,
    x_post: &Configuration<f64>,
    y: &Configuration<f64>,
    y_post: &Configuration<f64>,
    f: &LineRequest,
) -> Result<bool> {
    let k = x.k() as f64;
    let d_phi = potential(x_post, y_post)?.phi - potential(x, y)?.phi;
    let adv = match_cost(&Line, y, y_post)? + serve_cost(&Line, y_post, f);
    let alg = match_cost(&Line, x, x_post)? + serve_cost(&Line, x_post, f);
    if adv.is_infinite() {
        return Ok(true);
    }
    if alg.is_infinite() {
        return Ok(false);
    }
    Ok(d_phi <= 4.0 * k * adv - alg + CERTIFICATE_TOL)
}

/// The line algorithm as a stateful online chaser.
#[derive(Debug, Clone)]
pub struct LineChaser {
    current: Configuration<f64>,
}

impl LineChaser {
    pub fn new(start: Configuration<f64>) -> Self {
        Self { current: start }
    }
}

impl Chaser<Line, LineRequest> for LineChaser {
    fn configuration(&self) -> &Configuration<f64> {
        &self.current
    }

    fn respond(&mut self, _: &Line, request: &LineRequest) -> Result<StepRecord<f64>> {
        let step = chase_step(&self.current, request)?;
        self.current = step.post.clone();
        Ok(StepRecord {
            pre: step.pre,
            post: step.post,
            service: step.service,
            movement: step.movement,
        })
    }
}

use serde::Serialize;

use super::gadget::{PlanarGadget, Point2};
use super::interval::{hole_of, interval_union_from_kserver, IntervalUnion};
use crate::error::Result;
use crate::request::PlanarBody;

fn dist2(a: Point2, b: Point2) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// A deterministic two-server chaser of convex sets in the plane.
pub trait PlanarChaser {
    fn servers(&self) -> [Point2; 2];

    /// Moves so that some server meets `set`; returns the distance moved.
    fn serve(&mut self, set: &PlanarBody) -> f64;
}

/// Moves the closer server onto its nearest point of the set (lower index on
/// ties).
#[derive(Debug, Clone)]
pub struct GreedyPlanar {
    pub servers: [Point2; 2],
}

impl PlanarChaser for GreedyPlanar {
    fn servers(&self) -> [Point2; 2] {
        self.servers
    }

    fn serve(&mut self, set: &PlanarBody) -> f64 {
        if self.servers.iter().any(|s| set.contains(*s)) {
            return 0.0;
        }
        let d: Vec<f64> = self.servers.iter().map(|s| set.distance(*s)).collect();
        let i = if d[1] < d[0] { 1 } else { 0 };
        let target = set.project(self.servers[i]);
        let moved = dist2(self.servers[i], target);
        self.servers[i] = target;
        moved
    }
}

/// Both servers walk straight towards the set at equal speed until the
/// closer one arrives.
#[derive(Debug, Clone)]
pub struct DoubleCoveragePlanar {
    pub servers: [Point2; 2],
}

impl PlanarChaser for DoubleCoveragePlanar {
    fn servers(&self) -> [Point2; 2] {
        self.servers
    }

    fn serve(&mut self, set: &PlanarBody) -> f64 {
        if self.servers.iter().any(|s| set.contains(*s)) {
            return 0.0;
        }
        let step = self
            .servers
            .iter()
            .map(|s| set.distance(*s))
            .fold(f64::INFINITY, f64::min);
        let mut moved = 0.0;
        for s in self.servers.iter_mut() {
            let target = set.project(*s);
            let d = dist2(*s, target);
            if d <= step {
                *s = target;
                moved += d;
            } else {
                let t = step / d;
                *s = [s[0] + t * (target[0] - s[0]), s[1] + t * (target[1] - s[1])];
                moved += step;
            }
        }
        moved
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetRound {
    /// The point of `{1..n}` the chaser's position stood for.
    pub hole: usize,
    pub gadget: PlanarGadget,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetGame {
    pub online_cost: f64,
    /// Cost of a feasible offline answer (both servers stacked over one
    /// point of every union), so `online_cost / offline_cost` understates
    /// the true ratio.
    pub offline_cost: f64,
    pub ratio: f64,
    pub rounds: Vec<GadgetRound>,
}

/// A two-part union that is a subset of `u`; a single interval is cut into
/// its outer thirds.
fn two_part(u: &IntervalUnion) -> PlanarGadget {
    let (a1, a2, b1, b2) = if u.parts.len() == 2 {
        (u.parts[0].0, u.parts[0].1, u.parts[1].0, u.parts[1].1)
    } else {
        let (lo, hi) = u.parts[0];
        let third = (hi - lo) / 3.0;
        (lo, lo + third, hi - third, hi)
    };
    PlanarGadget { a1, a2, b1, b2 }
}

/// Plays `rounds` gadget rounds against `chaser`. Each round reads the point
/// the chaser's mean horizontal position stands for, requests the
/// corresponding two-interval union through the gadget, and repeats the four
/// sets `reps` times.
pub fn run_gadget_game<C: PlanarChaser + ?Sized>(
    chaser: &mut C,
    n: usize,
    rounds: usize,
    reps: usize,
) -> Result<GadgetGame> {
    let start_x = chaser.servers().iter().map(|s| s[0]).sum::<f64>() / 2.0;
    let mut online = 0.0;
    let mut log = Vec::with_capacity(rounds);
    let mut unions = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let x = chaser.servers().iter().map(|s| s[0]).sum::<f64>() / 2.0;
        let hole = hole_of(n, x);
        let gadget = two_part(&interval_union_from_kserver(n, hole)?);
        let mut cost = 0.0;
        for _ in 0..reps.max(1) {
            for set in gadget.sets().iter() {
                cost += chaser.serve(set);
            }
        }
        online += cost;
        unions.push(IntervalUnion::new(vec![
            (gadget.a1, gadget.a2),
            (gadget.b1, gadget.b2),
        ])?);
        log.push(GadgetRound { hole, gadget, cost });
    }
    let offline = 2.0 * union_chasing_opt(start_x, &unions);
    Ok(GadgetGame {
        online_cost: online,
        offline_cost: offline,
        ratio: if offline > 0.0 {
            online / offline
        } else {
            f64::INFINITY
        },
        rounds: log,
    })
}

/// Exact offline cost of chasing a sequence of interval unions with one
/// point on the line, starting at `start`.
///
/// Some optimal path only visits interval endpoints and the start, so a
/// dynamic program over those candidates is exact.
pub fn union_chasing_opt(start: f64, unions: &[IntervalUnion]) -> f64 {
    let mut grid: Vec<f64> = std::iter::once(start)
        .chain(
            unions
                .iter()
                .flat_map(|u| u.parts.iter().flat_map(|&(a, b)| [a, b])),
        )
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut cost: Vec<f64> = grid.iter().map(|g| (g - start).abs()).collect();
    for u in unions {
        // Distance transform in both directions, then restrict to the union.
        for i in 1..grid.len() {
            cost[i] = cost[i].min(cost[i - 1] + grid[i] - grid[i - 1]);
        }
        for i in (0..grid.len() - 1).rev() {
            cost[i] = cost[i].min(cost[i + 1] + grid[i + 1] - grid[i]);
        }
        for (c, g) in cost.iter_mut().zip(&grid) {
            if !u.contains(*g) {
                *c = f64::INFINITY;
            }
        }
    }
    cost.into_iter().fold(f64::INFINITY, f64::min)
}

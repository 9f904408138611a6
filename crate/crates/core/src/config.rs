//! Server configurations and the distances between them.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::Metric;
use crate::request::CostFunction;

/// An ordered multiset of `k` server positions.
///
/// Positions are kept in the metric's canonical order: sorted on the line,
/// sorted by label on finite metrics, insertion order in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration<P> {
    positions: Vec<P>,
}

impl<P: Clone + PartialEq + std::fmt::Debug> Configuration<P> {
    pub fn new<M: Metric<Point = P>>(metric: &M, mut positions: Vec<P>) -> Result<Self> {
        if positions.is_empty() {
            return invalid("a configuration needs at least one server");
        }
        for p in &positions {
            metric.validate_point(p)?;
        }
        metric.canonicalize(&mut positions);
        Ok(Self { positions })
    }

    /// Wraps positions that are already valid and canonical.
    pub(crate) fn from_canonical(positions: Vec<P>) -> Self {
        debug_assert!(!positions.is_empty());
        Self { positions }
    }

    pub fn k(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[P] {
        &self.positions
    }

    pub fn into_positions(self) -> Vec<P> {
        self.positions
    }

    /// Returns a copy with server `index` relocated to `to`, re-canonicalized.
    pub fn with_moved<M: Metric<Point = P>>(&self, metric: &M, index: usize, to: P) -> Self {
        let mut positions = self.positions.clone();
        positions[index] = to;
        metric.canonicalize(&mut positions);
        Self { positions }
    }

    pub fn contains(&self, p: &P) -> bool {
        self.positions.iter().any(|q| q == p)
    }
}

/// Cost of the minimum-cost matching between `x` and `y`.
///
/// On the line this is the sorted coordinate-wise pairing; elsewhere it is
/// the optimal assignment.
pub fn match_cost<M: Metric>(
    metric: &M,
    x: &Configuration<M::Point>,
    y: &Configuration<M::Point>,
) -> Result<f64> {
    if x.k() != y.k() {
        return invalid(format!(
            "configurations have {} and {} servers",
            x.k(),
            y.k()
        ));
    }
    Ok(metric.matching(x.positions(), y.positions()))
}

/// `min_i f(x_i)`; may be `+inf` for indicator requests.
pub fn serve_cost<M: Metric, F: CostFunction<M> + ?Sized>(
    metric: &M,
    x: &Configuration<M::Point>,
    f: &F,
) -> f64 {
    x.positions()
        .iter()
        .map(|p| f.value(metric, p))
        .fold(f64::INFINITY, f64::min)
}

/// Index of the server attaining `serve_cost` (lowest index on ties).
pub fn best_server<M: Metric, F: CostFunction<M> + ?Sized>(
    metric: &M,
    x: &Configuration<M::Point>,
    f: &F,
) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, p) in x.positions().iter().enumerate() {
        let v = f.value(metric, p);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Sum of distances over unordered server pairs.
pub fn pairwise_spread<M: Metric>(metric: &M, x: &Configuration<M::Point>) -> f64 {
    let p = x.positions();
    let mut total = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            total += metric.dist(&p[i], &p[j]);
        }
    }
    total
}

/// Minimum-cost assignment on a square cost matrix (shortest augmenting
/// path with potentials). Returns the cost and `assignment[row] = column`.
pub fn hungarian(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = cost.len();
    if n == 0 {
        return (0.0, Vec::new());
    }
    // 1-based arrays; column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (total, assignment)
}

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A union of at most two disjoint closed intervals inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    pub parts: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(mut parts: Vec<(f64, f64)>) -> Result<Self> {
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if parts.is_empty() || parts.len() > 2 {
            return invalid("an interval union has one or two parts");
        }
        for &(lo, hi) in &parts {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return invalid(format!("interval [{lo}, {hi}] is not inside [0, 1]"));
            }
        }
        if parts.len() == 2 && parts[0].1 >= parts[1].0 {
            return invalid("interval union parts overlap");
        }
        Ok(Self { parts })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Closest point of the union to `x`.
    pub fn project(&self, x: f64) -> f64 {
        self.parts
            .iter()
            .map(|&(lo, hi)| x.clamp(lo, hi))
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            .expect("non-empty union")
    }
}

/// The two-interval request standing in for a server request at point `i`
/// of `{1..n}`: everything except a neighbourhood of the `i`-th odd cell.
pub fn interval_union_from_kserver(n: usize, i: usize) -> Result<IntervalUnion> {
    if n < 2 || i == 0 || i > n {
        return invalid(format!("need n >= 2 and 1 <= i <= n, got n = {n}, i = {i}"));
    }
    let m = (2 * n - 1) as f64;
    let mut parts = Vec::new();
    if i >= 2 {
        parts.push((0.0, (2 * i - 3) as f64 / m));
    }
    if i < n {
        parts.push((2.0 * i as f64 / m, 1.0));
    }
    IntervalUnion::new(parts)
}

/// The point of `{1..n}` a chaser position stands for: its cell if the
/// cell is odd, otherwise the nearer odd neighbour (midpoints go right).
pub fn hole_of(n: usize, x: f64) -> usize {
    let m = (2 * n - 1) as f64;
    let scaled = (x.clamp(0.0, 1.0) * m).min(m - 1e-12);
    let cell = scaled.floor() as usize; // zero-based cell index
    if cell.is_multiple_of(2) {
        cell / 2 + 1
    } else if scaled - cell as f64 >= 0.5 {
        cell / 2 + 2
    } else {
        cell / 2 + 1
    }
}

/// Distance from `x` to the closure of the positions standing for `j`.
pub fn reinterpretation_cost(n: usize, x: f64, j: usize) -> f64 {
    let m = (2 * n - 1) as f64;
    let lo = if j == 1 {
        0.0
    } else {
        (2.0 * j as f64 - 2.5) / m
    };
    let hi = if j == n {
        1.0
    } else {
        (2.0 * j as f64 - 0.5) / m
    };
    (x - x.clamp(lo, hi)).abs()
}

use crate::error::{check_capacity, invalid, Result};
use crate::metric::{dot, l2_norm};

/// Candidate actions: points of `R^d` (a lattice restricted to the unit
/// ball, or evenly spaced points on an interval).
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub points: Vec<Vec<f64>>,
    /// Lattice spacing; the discretization error of convex 1-Lipschitz
    /// losses is at most this per round.
    pub spacing: f64,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Candidate losses of the linear function `x -> w . x`.
    pub fn linear_losses(&self, w: &[f64]) -> Vec<f64> {
        self.points.iter().map(|p| dot(p, w)).collect()
    }

    pub fn losses(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(p)).collect()
    }
}

/// `points` evenly spaced points on `[lo, hi]` (one point when `points = 1`,
/// at `lo`).
pub fn line_grid(lo: f64, hi: f64, points: usize) -> Result<CandidateSet> {
    if points == 0 || !(lo <= hi) {
        return invalid("line grid needs lo <= hi and at least one point");
    }
    let spacing = if points > 1 {
        (hi - lo) / (points - 1) as f64
    } else {
        0.0
    };
    Ok(CandidateSet {
        points: (0..points).map(|i| vec![lo + i as f64 * spacing]).collect(),
        spacing,
    })
}

/// The lattice `spacing * Z^d` intersected with the closed unit ball.
pub fn ball_grid(d: usize, spacing: f64) -> Result<CandidateSet> {
    if d == 0 || !(spacing > 0.0 && spacing <= 1.0) {
        return invalid("ball grid needs d >= 1 and spacing in (0, 1]");
    }
    let per_axis = (1.0 / spacing).floor() as i64;
    let side = (2 * per_axis + 1) as f64;
    check_capacity("ball lattice points", side.powi(d as i32), 1e7)?;
    let mut points = Vec::new();
    let mut idx = vec![-per_axis; d];
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| i as f64 * spacing).collect();
        if l2_norm(&p) <= 1.0 + 1e-12 {
            points.push(p);
        }
        let Some(axis) = (0..d).find(|&a| idx[a] < per_axis) else {
            break;
        };
        idx[axis] += 1;
        for a in idx.iter_mut().take(axis) {
            *a = -per_axis;
        }
    }
    Ok(CandidateSet { points, spacing })
}

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::metric::{l2_dist, l2_norm};
use crate::seed::Stream;

pub const REGION_RADIUS: f64 = 0.1;
pub const TRIPLE_SPACING: f64 = 0.01;

/// Regions on the coordinate axes, each holding three collinear points
/// `1/100` apart; requests are uniform draws over all points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterInstance {
    pub k: usize,
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    /// Indices into `points`, per region, in line order.
    pub regions: Vec<Vec<usize>>,
    /// Smallest gap between two region balls.
    pub separation: f64,
}

/// Builds `k / 2` triple regions, plus one single-point region when `k`
/// is odd, centred at `±0.9 e_i`.
pub fn cluster_instance(k: usize, dim: usize) -> Result<ClusterInstance> {
    if k < 2 || dim < 6 {
        return invalid(format!(
            "cluster instance needs k >= 2 and d >= 6, got k = {k}, d = {dim}"
        ));
    }
    let triples = k / 2;
    let regions = triples + k % 2;
    if regions > 2 * dim {
        return invalid(format!(
            "cannot place {regions} regions on the {} signed axes of R^{dim}; the achieved separation would be 0",
            2 * dim
        ));
    }
    let centre = |r: usize| {
        let mut c = vec![0.0; dim];
        c[r / 2] = if r.is_multiple_of(2) { 0.9 } else { -0.9 };
        c
    };
    let mut points = Vec::new();
    let mut members = Vec::new();
    for r in 0..regions {
        let c = centre(r);
        if r < triples {
            // Spread along an axis orthogonal to the centre direction.
            let axis = (r / 2 + 1) % dim;
            let mut idx = Vec::new();
            for offset in [-TRIPLE_SPACING, 0.0, TRIPLE_SPACING] {
                let mut p = c.clone();
                p[axis] += offset;
                idx.push(points.len());
                points.push(p);
            }
            members.push(idx);
        } else {
            members.push(vec![points.len()]);
            points.push(c);
        }
    }
    let mut separation = f64::INFINITY;
    for a in 0..regions {
        for b in a + 1..regions {
            separation = separation.min(l2_dist(&centre(a), &centre(b)) - 2.0 * REGION_RADIUS);
        }
    }
    let inst = ClusterInstance {
        k,
        dim,
        points,
        regions: members,
        separation,
    };
    inst.verify()?;
    Ok(inst)
}

impl ClusterInstance {
    fn verify(&self) -> Result<()> {
        for (r, idx) in self.regions.iter().enumerate() {
            let c = &self.points[idx[idx.len() / 2]];
            for w in idx.windows(2) {
                let gap = l2_dist(&self.points[w[0]], &self.points[w[1]]);
                if (gap - TRIPLE_SPACING).abs() > 1e-12 {
                    return invalid(format!("region {r} spacing {gap}"));
                }
            }
            if idx
                .iter()
                .any(|&i| l2_dist(&self.points[i], c) > REGION_RADIUS)
            {
                return invalid(format!("region {r} leaves its ball"));
            }
        }
        if self.points.iter().any(|p| l2_norm(p) > 1.0 + 1e-12) {
            return invalid("cluster point outside the unit ball");
        }
        if self.regions.len() > 1 && self.separation < REGION_RADIUS {
            return invalid(format!(
                "region separation {} below {REGION_RADIUS}",
                self.separation
            ));
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut Stream) -> &[f64] {
        &self.points[rng.gen_range(0..self.points.len())]
    }

    /// Sum over `points` of the squared distance to the nearest centre.
    pub fn cost(centers: &[Vec<f64>], points: &[&[f64]]) -> f64 {
        points
            .iter()
            .map(|p| {
                centers
                    .iter()
                    .map(|c| l2_dist(c, p).powi(2))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    /// Cost of one cluster served by its mean.
    pub fn single_cluster_cost(points: &[&[f64]]) -> f64 {
        let dim = points[0].len();
        let mean: Vec<f64> = (0..dim)
            .map(|i| points.iter().map(|p| p[i]).sum::<f64>() / points.len() as f64)
            .collect();
        Self::cost(&[mean], points)
    }
}

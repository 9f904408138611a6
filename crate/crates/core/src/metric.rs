//! Metric spaces the servers live in.
//!
//! Three spaces are supported: the real line, Euclidean `R^d`, and finite
//! metrics given by a distance matrix. Each one fixes its point type, so a
//! configuration on the line can never be matched against one on a finite
//! metric.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const TRIANGLE_TOL: f64 = 1e-9;

pub trait Metric {
    type Point: Clone + PartialEq + Debug;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Rejects points that do not belong to the space (wrong dimension,
    /// unknown label, non-finite coordinates).
    fn validate_point(&self, p: &Self::Point) -> Result<()>;

    /// Puts a list of server positions into the canonical stored order.
    fn canonicalize(&self, _points: &mut [Self::Point]) {}

    /// Minimum-cost perfect matching between two equally sized point lists.
    fn matching(&self, xs: &[Self::Point], ys: &[Self::Point]) -> f64 {
        let cost: Vec<Vec<f64>> = xs
            .iter()
            .map(|x| ys.iter().map(|y| self.dist(x, y)).collect())
            .collect();
        crate::config::hungarian(&cost).0
    }

    /// Text form used in trajectory CSV cells.
    fn format_point(&self, p: &Self::Point) -> String;
}

/// The real line with `|x - y|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Line;

impl Metric for Line {
    type Point = f64;

    fn dist(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }

    fn validate_point(&self, p: &f64) -> Result<()> {
        if p.is_finite() {
            Ok(())
        } else {
            invalid(format!("line point {p} is not finite"))
        }
    }

    fn canonicalize(&self, points: &mut [f64]) {
        points.sort_by(f64::total_cmp);
    }

    fn matching(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let mut a = xs.to_vec();
        let mut b = ys.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum()
    }

    fn format_point(&self, p: &f64) -> String {
        format!("{p}")
    }
}

/// `R^d` with the L2 norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Euclidean {
    pub dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return invalid("euclidean dimension must be positive");
        }
        Ok(Self { dim })
    }
}

pub fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn l2_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Metric for Euclidean {
    type Point = Vec<f64>;

    fn dist(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        l2_dist(a, b)
    }

    fn validate_point(&self, p: &Vec<f64>) -> Result<()> {
        if p.len() != self.dim {
            return invalid(format!(
                "point has dimension {}, metric has dimension {}",
                p.len(),
                self.dim
            ));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return invalid("point has non-finite coordinates");
        }
        Ok(())
    }

    fn format_point(&self, p: &Vec<f64>) -> String {
        p.iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// A finite metric over labelled points `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFinite")]
pub struct FiniteMetric {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawFinite {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl TryFrom<RawFinite> for FiniteMetric {
    type Error = crate::error::Error;
    fn try_from(raw: RawFinite) -> Result<Self> {
        Self::new(raw.labels, raw.dist)
    }
}

impl FiniteMetric {
    /// Builds the metric after checking symmetry, the zero diagonal,
    /// non-negativity and the triangle inequality (tolerance `1e-9`).
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return invalid("finite metric needs at least one point");
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return invalid("distance matrix must be n x n");
        }
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return invalid(format!("dist[{i}][{i}] = {} is not zero", dist[i][i]));
            }
            for j in 0..n {
                let d = dist[i][j];
                if !d.is_finite() || d < 0.0 {
                    return invalid(format!(
                        "dist[{i}][{j}] = {d} is not a finite non-negative real"
                    ));
                }
                if (d - dist[j][i]).abs() > TRIANGLE_TOL {
                    return invalid(format!("distance matrix not symmetric at ({i}, {j})"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for m in 0..n {
                    if dist[i][j] > dist[i][m] + dist[m][j] + TRIANGLE_TOL {
                        return invalid(format!(
                            "triangle inequality violated: d({i},{j}) > d({i},{m}) + d({m},{j})"
                        ));
                    }
                }
            }
        }
        Ok(Self { labels, dist })
    }

    /// The uniform metric: every pair of distinct points at distance 1.
    pub fn uniform(n: usize) -> Result<Self> {
        let dist = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new((1..=n).map(|i| i.to_string()).collect(), dist)
    }

    /// The metric induced by a list of Euclidean points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| l2_dist(a, b)).collect())
            .collect();
        Self::new((0..points.len()).map(|i| format!("p{i}")).collect(), dist)
    }

    /// Points of the real line with their absolute differences.
    pub fn from_line(xs: &[f64]) -> Result<Self> {
        let dist = xs
            .iter()
            .map(|a| xs.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::new(xs.iter().map(|x| format!("{x}")).collect(), dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn diameter(&self) -> f64 {
        self.dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }
}

impl Metric for FiniteMetric {
    type Point = usize;

    fn dist(&self, a: &usize, b: &usize) -> f64 {
        self.dist[*a][*b]
    }

    fn validate_point(&self, p: &usize) -> Result<()> {
        if *p < self.labels.len() {
            Ok(())
        } else {
            invalid(format!(
                "label index {p} outside metric of size {}",
                self.len()
            ))
        }
    }

    fn canonicalize(&self, points: &mut [usize]) {
        points.sort_unstable();
    }

    fn format_point(&self, p: &usize) -> String {
        self.labels[*p].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_metric_rejects_triangle_violation() {
        let d = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        let labels = vec!["a".into(), "b".into(), "c".into()];
        assert!(FiniteMetric::new(labels, d).is_err());
    }

    #[test]
    fn finite_metric_rejects_asymmetry_and_diagonal() {
        let labels: Vec<String> = vec!["a".into(), "b".into()];
        assert!(FiniteMetric::new(labels.clone(), vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetric::new(labels, vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn euclidean_distance_is_l2() {
        let e = Euclidean::new(2).unwrap();
        assert_eq!(e.dist(&vec![0.0, 0.0], &vec![3.0, 4.0]), 5.0);
        assert!(e.validate_point(&vec![1.0]).is_err());
        assert_eq!(e.format_point(&vec![1.5, -2.0]), "1.5;-2");
    }
}

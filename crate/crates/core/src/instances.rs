//! Seeded random instance generators shared by tests and experiments.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::Result;
use crate::kmedian::{MedianInstance, MedianRequest};
use crate::metric::FiniteMetric;
use crate::request::{LineRequest, PiecewiseLinear};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineFamily {
    PiecewiseLinear,
    Cone,
    Quadratic,
    /// Uniform choice among the three families above, per request.
    Mixed,
}

/// Convex piecewise-linear request with four knots in `[lo, hi]` and a
/// minimum value in `[0, 1)`.
pub fn random_piecewise<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> PiecewiseLinear {
    let mut xs: Vec<f64> = (0..4).map(|_| rng.gen_range(lo..hi)).collect();
    xs.sort_by(f64::total_cmp);
    for i in 1..xs.len() {
        if xs[i] <= xs[i - 1] {
            xs[i] = xs[i - 1] + 1e-3;
        }
    }
    let mut slopes = [
        rng.gen_range(-2.0..-0.05),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(0.05..2.0),
    ];
    slopes.sort_by(f64::total_cmp);
    let mut vals = vec![0.0];
    for (i, s) in slopes.iter().enumerate() {
        vals.push(vals[i] + s * (xs[i + 1] - xs[i]));
    }
    let floor = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let lift = rng.gen_range(0.0..1.0);
    let knots = xs
        .into_iter()
        .zip(vals.into_iter().map(|v| v - floor + lift))
        .collect();
    PiecewiseLinear::new(knots).expect("generated knots are convex and non-negative")
}

pub fn random_line_request<R: Rng + ?Sized>(
    rng: &mut R,
    family: LineFamily,
    lo: f64,
    hi: f64,
) -> LineRequest {
    let family = match family {
        LineFamily::Mixed => *[
            LineFamily::PiecewiseLinear,
            LineFamily::Cone,
            LineFamily::Quadratic,
        ]
        .choose(rng)
        .unwrap(),
        f => f,
    };
    match family {
        LineFamily::PiecewiseLinear => LineRequest::PiecewiseLinear(random_piecewise(rng, lo, hi)),
        LineFamily::Cone => {
            LineRequest::power(rng.gen_range(lo..hi), 1.0, rng.gen_range(0.1..1.0)).unwrap()
        }
        _ => LineRequest::power(rng.gen_range(lo..hi), 2.0, rng.gen_range(0.05..0.5)).unwrap(),
    }
}

/// Metric induced by `n` uniform random points in `[0, 10]^dim`.
pub fn random_finite_metric<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    dim: usize,
) -> Result<FiniteMetric> {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(0.0..10.0)).collect())
        .collect();
    FiniteMetric::from_points(&pts)
}

/// Random k-median instance: `n` points in `[0, 10]^dim`, weights uniform in
/// `[c_min, 1]`, centers and start labels uniform.
pub fn random_median_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    len: usize,
    dim: usize,
    c_min: f64,
) -> Result<MedianInstance> {
    let metric = random_finite_metric(rng, n, dim)?;
    let requests = (0..len)
        .map(|_| MedianRequest::new(rng.gen_range(c_min..=1.0), rng.gen_range(0..n)))
        .collect::<Result<Vec<_>>>()?;
    let start = Configuration::new(&metric, (0..k).map(|_| rng.gen_range(0..n)).collect())?;
    Ok(MedianInstance {
        metric,
        requests,
        start,
    })
}

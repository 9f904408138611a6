//! Confidence intervals and power-law fits.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{HarnessError, Result};
use kchase::seed::Stream;

/// Confidence level used for every reported interval.
pub const CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean with a two-sided Student-t interval at [`CONFIDENCE`]. With fewer
/// than two samples the interval collapses to the mean.
pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary {
            n,
            mean: 0.0,
            ci_low: 0.0,
            ci_high: 0.0,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Summary {
            n,
            mean,
            ci_low: mean,
            ci_high: mean,
        };
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + CONFIDENCE / 2.0);
    let half = t * (var / n as f64).sqrt();
    Summary {
        n,
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
    }
}

/// Per-horizon samples of final regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSample {
    pub horizon: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub exponent: f64,
    /// Bootstrap 5% and 95% quantiles of the exponent.
    pub band_low: f64,
    pub band_high: f64,
    pub horizons: Vec<f64>,
    pub means: Vec<f64>,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Least-squares slope of `log(mean regret)` against `log T`, with a band
/// from resampling the trials at each horizon.
pub fn fit_exponent(samples: &[FitSample], resamples: usize, rng: &mut Stream) -> Result<Fit> {
    if samples.len() < 2 {
        return Err(HarnessError::FitRefused(
            "need at least two horizons".into(),
        ));
    }
    let mut horizons: Vec<f64> = samples.iter().map(|s| s.horizon).collect();
    horizons.dedup();
    if horizons.len() != samples.len() || horizons.iter().any(|h| !(*h > 0.0)) {
        return Err(HarnessError::FitRefused(
            "horizons must be positive and distinct".into(),
        ));
    }
    if samples.iter().any(|s| s.values.is_empty()) {
        return Err(HarnessError::FitRefused(
            "every horizon needs at least one sample".into(),
        ));
    }
    let means: Vec<f64> = samples.iter().map(|s| mean(&s.values)).collect();
    if let Some((s, m)) = samples.iter().zip(&means).find(|(_, m)| !(**m > 0.0)) {
        return Err(HarnessError::FitRefused(format!(
            "mean regret {m} at T = {} is not positive; a log-log fit is undefined",
            s.horizon
        )));
    }
    let log_t: Vec<f64> = horizons.iter().map(|h| h.ln()).collect();
    let exponent = slope(&log_t, &means.iter().map(|m| m.ln()).collect::<Vec<_>>());
    let mut boot = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let ms: Vec<f64> = samples
            .iter()
            .map(|s| {
                let n = s.values.len();
                (0..n).map(|_| s.values[rng.gen_range(0..n)]).sum::<f64>() / n as f64
            })
            .collect();
        // A resample with a non-positive mean has no logarithm; skip it.
        if ms.iter().all(|m| *m > 0.0) {
            boot.push(slope(
                &log_t,
                &ms.iter().map(|m| m.ln()).collect::<Vec<_>>(),
            ));
        }
    }
    boot.sort_by(f64::total_cmp);
    let q = |p: f64| {
        if boot.is_empty() {
            exponent
        } else {
            boot[((boot.len() - 1) as f64 * p).round() as usize]
        }
    };
    Ok(Fit {
        exponent,
        band_low: q(0.05),
        band_high: q(0.95),
        horizons,
        means,
    })
}

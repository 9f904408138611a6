use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use kchase::SeedTree;

use crate::config::require;
use crate::error::{config_error, HarnessError, Result};
use crate::report::Outcome;
use crate::stats::{fit_exponent, Fit, FitSample};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Regret values grouped by horizon.
    #[serde(default)]
    pub samples: Vec<FitSampleConfig>,
    /// A `report.json` from `regret-hedge` or `regret-ftl`; its per-trial
    /// `(horizon, regret)` pairs are added to `samples`.
    pub report: Option<PathBuf>,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSampleConfig {
    pub horizon: f64,
    pub values: Vec<f64>,
}

fn default_resamples() -> usize {
    1000
}

fn from_report(path: &PathBuf) -> Result<Vec<FitSample>> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    let report: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let Some(trials) = report.get("trials").and_then(|t| t.as_array()) else {
        return config_error(format!("{} has no trials array", path.display()));
    };
    let mut grouped: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for t in trials {
        match (
            t.get("horizon").and_then(|h| h.as_u64()),
            t.get("regret").and_then(|r| r.as_f64()),
        ) {
            (Some(h), Some(r)) => grouped.entry(h).or_default().push(r),
            _ => {
                return config_error(format!(
                    "{} trials lack horizon/regret fields",
                    path.display()
                ))
            }
        }
    }
    Ok(grouped
        .into_iter()
        .map(|(h, values)| FitSample {
            horizon: h as f64,
            values,
        })
        .collect())
}

pub fn fit(cfg: &FitConfig, seeds: &SeedTree) -> Result<Fit> {
    require(cfg.resamples >= 1, "resamples must be positive")?;
    let mut samples: Vec<FitSample> = cfg
        .samples
        .iter()
        .map(|s| FitSample {
            horizon: s.horizon,
            values: s.values.clone(),
        })
        .collect();
    if let Some(path) = &cfg.report {
        samples.extend(from_report(path)?);
    }
    fit_exponent(
        &samples,
        cfg.resamples,
        &mut seeds.child("bootstrap").stream(),
    )
}

pub fn fit_outcome(cfg: &FitConfig, seeds: &SeedTree) -> Result<Outcome> {
    let f = fit(cfg, seeds)?;
    Ok(Outcome::new(
        vec![seeds.seed_u64()],
        &Vec::<()>::new(),
        &f,
        Vec::new(),
    ))
}

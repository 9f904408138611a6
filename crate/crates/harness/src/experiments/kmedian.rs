use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kchase::instances::random_median_instance;
use kchase::kmedian::{verify_cost_chain, ChainFlags, Charging};
use kchase::SeedTree;

use crate::config::require;
use crate::error::Result;
use crate::report::{Artifact, Outcome};
use crate::stats::{summarize, Summary};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmedianConfig {
    pub instances: usize,
    pub trials: usize,
    pub n: usize,
    pub k: usize,
    pub horizon: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Smallest request coefficient.
    #[serde(default = "default_c_min")]
    pub c_min: f64,
    #[serde(default = "default_charging")]
    pub charging: Charging,
}

fn default_dim() -> usize {
    2
}
fn default_c_min() -> f64 {
    0.05
}
fn default_charging() -> Charging {
    Charging::Standard
}

#[derive(Debug, Clone, Serialize)]
pub struct KmedianTrial {
    pub seed: u64,
    pub ratio_mean: f64,
    pub ratio_ci_low: f64,
    pub ratio_ci_high: f64,
    pub chain_flags: ChainFlags,
    pub opt_full: f64,
    pub mean_filter_cost: f64,
    pub mean_server_cost: f64,
    pub mean_server_opt: f64,
    pub mtm_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct KmedianSummary {
    pub instances: usize,
    pub chains_holding: usize,
    pub mtm_violations: usize,
    /// Mean over instances of the per-instance mean ratio.
    pub ratio: Summary,
    /// `4(2k - 1)`.
    pub ratio_bound: f64,
}

pub fn validate(cfg: &KmedianConfig) -> Result<()> {
    require(
        cfg.instances >= 1 && cfg.trials >= 1 && cfg.horizon >= 1,
        "instances, trials and horizon must be positive",
    )?;
    require(cfg.k >= 1 && cfg.n >= cfg.k, "need 1 <= k <= n")?;
    require(
        cfg.c_min > 0.0 && cfg.c_min <= 1.0,
        "c_min must lie in (0, 1]",
    )
}

fn run_instance(
    cfg: &KmedianConfig,
    seeds: &SeedTree,
) -> Result<(KmedianTrial, Vec<kchase::kmedian::MedianRequest<usize>>)> {
    let inst = random_median_instance(
        &mut seeds.child("instance").stream(),
        cfg.n,
        cfg.k,
        cfg.horizon,
        cfg.dim,
        cfg.c_min,
    )?;
    let rep = verify_cost_chain(&inst, cfg.charging, cfg.trials, &seeds.child("coins"))?;
    let r = summarize(&rep.ratios);
    Ok((
        KmedianTrial {
            seed: seeds.seed_u64(),
            ratio_mean: r.mean,
            ratio_ci_low: r.ci_low,
            ratio_ci_high: r.ci_high,
            chain_flags: rep.flags,
            opt_full: rep.opt_full,
            mean_filter_cost: rep.mean_filter_cost,
            mean_server_cost: rep.mean_server_cost,
            mean_server_opt: rep.mean_server_opt,
            mtm_violations: rep.mtm_violations,
        },
        inst.requests,
    ))
}

pub fn kmedian_filter(
    cfg: &KmedianConfig,
    seeds: &SeedTree,
) -> Result<(KmedianSummary, Vec<KmedianTrial>, Vec<Artifact>)> {
    validate(cfg)?;
    let runs = (0..cfg.instances)
        .into_par_iter()
        .map(|i| run_instance(cfg, &seeds.child("instance").child(i)))
        .collect::<Result<Vec<_>>>()?;
    let artifacts = runs
        .first()
        .map(|(_, reqs)| Artifact::jsonl("requests/instance_0.jsonl", reqs))
        .into_iter()
        .collect();
    let trials: Vec<KmedianTrial> = runs.into_iter().map(|(t, _)| t).collect();
    let means: Vec<f64> = trials
        .iter()
        .filter(|t| t.opt_full > 0.0)
        .map(|t| t.ratio_mean)
        .collect();
    let summary = KmedianSummary {
        instances: trials.len(),
        chains_holding: trials.iter().filter(|t| t.chain_flags.all_hold()).count(),
        mtm_violations: trials.iter().map(|t| t.mtm_violations).sum(),
        ratio: summarize(&means),
        ratio_bound: 4.0 * (2 * cfg.k - 1) as f64,
    };
    Ok((summary, trials, artifacts))
}

pub fn kmedian_outcome(cfg: &KmedianConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, trials, artifacts) = kmedian_filter(cfg, seeds)?;
    Ok(Outcome::new(
        trials.iter().map(|t| t.seed).collect(),
        &trials,
        &summary,
        artifacts,
    ))
}

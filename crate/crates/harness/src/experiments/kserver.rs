use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kchase::instances::random_finite_metric;
use kchase::kserver::{kserver_opt, WorkFunctionAlgorithm};
use kchase::{Configuration, SeedTree, Trajectory};

use crate::config::require;
use crate::error::Result;
use crate::report::{Artifact, Outcome};
use crate::stats::{summarize, Summary};

/// Slack on the Lipschitz, monotonicity and cost checks.
pub const WFA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KserverConfig {
    pub instances: usize,
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    pub n_max: usize,
    pub k_max: usize,
    pub horizon: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub trajectories: usize,
}

fn default_n_min() -> usize {
    2
}
fn default_dim() -> usize {
    2
}

#[derive(Debug, Clone, Serialize)]
pub struct KserverTrial {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub cost: f64,
    pub opt: f64,
    pub diameter: f64,
    pub bound: f64,
    pub bound_holds: bool,
    pub lipschitz_violations: usize,
    pub monotonicity_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct KserverSummary {
    pub instances: usize,
    pub bound_violations: usize,
    pub lipschitz_violations: usize,
    pub monotonicity_violations: usize,
    pub ratio: Summary,
}

pub fn validate(cfg: &KserverConfig) -> Result<()> {
    require(
        cfg.instances >= 1 && cfg.horizon >= 1,
        "instances and horizon must be positive",
    )?;
    require(
        2 <= cfg.n_min && cfg.n_min <= cfg.n_max,
        "need 2 <= n_min <= n_max",
    )?;
    require(
        cfg.k_max >= 1 && cfg.dim >= 1,
        "k_max and dim must be positive",
    )
}

fn run_instance(cfg: &KserverConfig, seeds: &SeedTree) -> Result<(KserverTrial, String)> {
    let mut rng = seeds.stream();
    let n = rng.gen_range(cfg.n_min..=cfg.n_max);
    let k = rng.gen_range(1..=cfg.k_max.min(n - 1));
    let metric = random_finite_metric(&mut rng, n, cfg.dim)?;
    let start = Configuration::new(&metric, sample(&mut rng, n, k).into_vec())?;
    let requests: Vec<usize> = (0..cfg.horizon).map(|_| rng.gen_range(0..n)).collect();
    let mut wfa = WorkFunctionAlgorithm::new(&metric, &start)?;
    let table = wfa.space().match_matrix(&metric)?;
    let (mut lipschitz, mut monotone) = (0, 0);
    let mut trajectory = Trajectory::default();
    for &r in &requests {
        let before = wfa.work_function().values().to_vec();
        let pre = wfa.current().clone();
        let step = wfa.step(&metric, r)?;
        trajectory.push(pre.positions(), step.post.positions(), 0.0, step.movement);
        let w = wfa.work_function();
        if w.lipschitz_excess(&table) > WFA_TOL {
            lipschitz += 1;
        }
        if w.values()
            .iter()
            .zip(&before)
            .any(|(a, b)| *a < b - WFA_TOL)
        {
            monotone += 1;
        }
    }
    let cost = trajectory.total();
    let opt = kserver_opt(&metric, &requests, &start)?;
    let bound = (2 * k - 1) as f64 * opt + k as f64 * metric.diameter();
    Ok((
        KserverTrial {
            seed: seeds.seed_u64(),
            n,
            k,
            cost,
            opt,
            diameter: metric.diameter(),
            bound,
            bound_holds: cost <= bound + WFA_TOL,
            lipschitz_violations: lipschitz,
            monotonicity_violations: monotone,
        },
        trajectory.to_csv(&metric),
    ))
}

pub fn kserver_wfa(
    cfg: &KserverConfig,
    seeds: &SeedTree,
) -> Result<(KserverSummary, Vec<KserverTrial>, Vec<Artifact>)> {
    validate(cfg)?;
    let runs = (0..cfg.instances)
        .into_par_iter()
        .map(|i| run_instance(cfg, &seeds.child("instance").child(i)))
        .collect::<Result<Vec<_>>>()?;
    let artifacts = runs
        .iter()
        .take(cfg.trajectories)
        .enumerate()
        .map(|(i, (_, t))| Artifact::new(format!("trajectories/instance_{i}.csv"), t.clone()))
        .collect();
    let trials: Vec<KserverTrial> = runs.into_iter().map(|(t, _)| t).collect();
    let ratios: Vec<f64> = trials
        .iter()
        .filter(|t| t.opt > 0.0)
        .map(|t| t.cost / t.opt)
        .collect();
    let summary = KserverSummary {
        instances: trials.len(),
        bound_violations: trials.iter().filter(|t| !t.bound_holds).count(),
        lipschitz_violations: trials.iter().map(|t| t.lipschitz_violations).sum(),
        monotonicity_violations: trials.iter().map(|t| t.monotonicity_violations).sum(),
        ratio: summarize(&ratios),
    };
    Ok((summary, trials, artifacts))
}

pub fn kserver_outcome(cfg: &KserverConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, trials, artifacts) = kserver_wfa(cfg, seeds)?;
    Ok(Outcome::new(
        trials.iter().map(|t| t.seed).collect(),
        &trials,
        &summary,
        artifacts,
    ))
}

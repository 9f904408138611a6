use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kchase::instances::random_finite_metric;
use kchase::kmedian::Charging;
use kchase::oracles::chasing_opt_finite;
use kchase::request::PowerDistance;
use kchase::wellsharp::{check_well_sharpened, power_distance_beta, WellSharpenedPipeline};
use kchase::{Configuration, Euclidean, FiniteMetric, SeedTree, Trajectory};

use crate::config::require;
use crate::error::Result;
use crate::report::{Artifact, Outcome};
use crate::stats::{summarize, Summary};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessGrid {
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub samples: usize,
    #[serde(default = "default_sharp_dim")]
    pub dim: usize,
}

fn default_sharp_dim() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WsrwfaConfig {
    pub runs: usize,
    pub n: usize,
    pub k: usize,
    pub horizon: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Request exponents are drawn uniformly from this range.
    pub gamma_min: f64,
    pub gamma_max: f64,
    /// Sharpness parameter used for the replacement certificate.
    pub alpha: f64,
    #[serde(default = "default_charging")]
    pub charging: Charging,
    #[serde(default)]
    pub trajectories: usize,
    pub sharpness: Option<SharpnessGrid>,
}

fn default_dim() -> usize {
    2
}
fn default_charging() -> Charging {
    Charging::Blind
}

#[derive(Debug, Clone, Serialize)]
pub struct WsrwfaTrial {
    pub seed: u64,
    pub cost: f64,
    pub opt: f64,
    pub pieces: usize,
    pub implication_checks: usize,
    pub implication_failures: usize,
    pub mtm_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessCell {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub sampled: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WsrwfaSummary {
    pub runs: usize,
    pub implication_checks: usize,
    pub implication_failures: usize,
    pub mtm_violations: usize,
    pub ratio: Summary,
    pub sharpness: Vec<SharpnessCell>,
}

pub fn validate(cfg: &WsrwfaConfig) -> Result<()> {
    require(
        cfg.runs >= 1 && cfg.horizon >= 1,
        "runs and horizon must be positive",
    )?;
    require(cfg.k >= 1 && cfg.n >= cfg.k, "need 1 <= k <= n")?;
    require(
        1.0 <= cfg.gamma_min && cfg.gamma_min <= cfg.gamma_max,
        "need 1 <= gamma_min <= gamma_max",
    )?;
    require(cfg.alpha > 1.0, "alpha must exceed 1")?;
    if let Some(s) = &cfg.sharpness {
        require(
            s.alphas.iter().all(|a| *a > 1.0),
            "sharpness alphas must exceed 1",
        )?;
        require(
            s.gammas.iter().all(|g| *g >= 1.0),
            "sharpness gammas must be at least 1",
        )?;
        require(
            s.dim >= 1 && s.samples >= 1,
            "sharpness dim and samples must be positive",
        )?;
    }
    Ok(())
}

fn run_once(cfg: &WsrwfaConfig, seeds: &SeedTree) -> Result<(WsrwfaTrial, String)> {
    let mut rng = seeds.child("instance").stream();
    let metric: FiniteMetric = random_finite_metric(&mut rng, cfg.n, cfg.dim)?;
    let start = Configuration::new(&metric, sample(&mut rng, cfg.n, cfg.k).into_vec())?;
    let requests = (0..cfg.horizon)
        .map(|_| {
            PowerDistance::new(
                rng.gen_range(0..cfg.n),
                rng.gen_range(cfg.gamma_min..=cfg.gamma_max),
                1.0,
            )
        })
        .collect::<kchase::Result<Vec<_>>>()?;
    let mut pipeline =
        WellSharpenedPipeline::new(&metric, &start, seeds.child("coins").stream(), cfg.charging)?
            .with_certificate(cfg.alpha, power_distance_beta(cfg.gamma_max, cfg.alpha));
    let mut trajectory = Trajectory::default();
    let mut trial = WsrwfaTrial {
        seed: seeds.seed_u64(),
        cost: 0.0,
        opt: chasing_opt_finite(&metric, &requests, &start)?,
        pieces: 0,
        implication_checks: 0,
        implication_failures: 0,
        mtm_violations: 0,
    };
    for f in &requests {
        let step = pipeline.respond(&metric, f)?;
        trial.cost += step.service + step.movement;
        trial.pieces += step.pieces;
        trial.implication_checks += step.implication_checks;
        trial.implication_failures += step.implication_failures;
        trial.mtm_violations += step.mtm_violations;
        trajectory.push(
            step.pre.positions(),
            step.post.positions(),
            step.service,
            step.movement,
        );
    }
    Ok((trial, trajectory.to_csv(&metric)))
}

/// Samples `samples` pairs from `[-5, 5]^dim` for each `(alpha, gamma)`.
pub fn sharpness_grid(grid: &SharpnessGrid, seeds: &SeedTree) -> Result<Vec<SharpnessCell>> {
    let metric = Euclidean::new(grid.dim)?;
    let mut out = Vec::new();
    for &alpha in &grid.alphas {
        for &gamma in &grid.gammas {
            let beta = power_distance_beta(gamma, alpha);
            let z = vec![0.0; grid.dim];
            let f = PowerDistance::new(z.clone(), gamma, 1.0)?;
            let mut rng = seeds
                .child(format!("alpha={alpha}"))
                .child(format!("gamma={gamma}"))
                .stream();
            let dim = grid.dim;
            let w =
                check_well_sharpened(&metric, &f, &z, alpha, beta, grid.samples, &mut rng, |r| {
                    (0..dim).map(|_| r.gen_range(-5.0..5.0)).collect()
                })?;
            out.push(SharpnessCell {
                alpha,
                gamma,
                beta,
                sampled: w.sampled,
                violations: w.violation_count,
            });
        }
    }
    Ok(out)
}

pub fn wsrwfa(
    cfg: &WsrwfaConfig,
    seeds: &SeedTree,
) -> Result<(WsrwfaSummary, Vec<WsrwfaTrial>, Vec<Artifact>)> {
    validate(cfg)?;
    let runs = (0..cfg.runs)
        .into_par_iter()
        .map(|i| run_once(cfg, &seeds.child("run").child(i)))
        .collect::<Result<Vec<_>>>()?;
    let artifacts = runs
        .iter()
        .take(cfg.trajectories)
        .enumerate()
        .map(|(i, (_, csv))| Artifact::new(format!("trajectories/run_{i}.csv"), csv.clone()))
        .collect();
    let trials: Vec<WsrwfaTrial> = runs.into_iter().map(|(t, _)| t).collect();
    let sharpness = match &cfg.sharpness {
        Some(g) => sharpness_grid(g, &seeds.child("sharpness"))?,
        None => Vec::new(),
    };
    let ratios: Vec<f64> = trials
        .iter()
        .filter(|t| t.opt > 0.0)
        .map(|t| t.cost / t.opt)
        .collect();
    let summary = WsrwfaSummary {
        runs: trials.len(),
        implication_checks: trials.iter().map(|t| t.implication_checks).sum(),
        implication_failures: trials.iter().map(|t| t.implication_failures).sum(),
        mtm_violations: trials.iter().map(|t| t.mtm_violations).sum(),
        ratio: summarize(&ratios),
        sharpness,
    };
    Ok((summary, trials, artifacts))
}

pub fn wsrwfa_outcome(cfg: &WsrwfaConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, trials, artifacts) = wsrwfa(cfg, seeds)?;
    Ok(Outcome::new(
        trials.iter().map(|t| t.seed).collect(),
        &trials,
        &summary,
        artifacts,
    ))
}

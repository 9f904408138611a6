use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kchase::instances::{random_line_request, LineFamily};
use kchase::line_chaser::{certify_step, chase_step, potential};
use kchase::oracles::{breakpoint_grid, chasing_opt_line};
use kchase::{Configuration, Line, LineRequest, SeedTree, Trajectory};

use crate::config::{require, OneOrMany};
use crate::error::Result;
use crate::report::{Artifact, Outcome};
use crate::stats::{summarize, Summary};

/// Additive slack on the competitive bound.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaseLineConfig {
    /// Server counts, cycled over instances.
    pub k: OneOrMany<usize>,
    pub horizon: usize,
    pub instances: usize,
    #[serde(default = "default_family")]
    pub family: LineFamily,
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
    /// How many instances get trajectory and request files.
    #[serde(default)]
    pub trajectories: usize,
}

fn default_family() -> LineFamily {
    LineFamily::Mixed
}
fn default_lo() -> f64 {
    -10.0
}
fn default_hi() -> f64 {
    10.0
}

#[derive(Debug, Clone, Serialize)]
pub struct LineTrial {
    pub seed: u64,
    pub k: usize,
    pub cost: f64,
    pub service: f64,
    pub movement: f64,
    pub opt: f64,
    /// Starting potential against the optimum's start.
    pub phi0: f64,
    pub bound: f64,
    pub bound_holds: bool,
    pub certificate_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineSummary {
    pub instances: usize,
    pub bound_violations: usize,
    pub certificate_violations: usize,
    pub ratio: Summary,
    pub worst_ratio: f64,
}

struct LineRun {
    trial: LineTrial,
    trajectory: Trajectory<f64>,
    requests: Vec<LineRequest>,
}

fn run_instance(cfg: &ChaseLineConfig, k: usize, seeds: &SeedTree) -> Result<LineRun> {
    let mut rng = seeds.stream();
    let x0 = Configuration::new(
        &Line,
        (0..k).map(|_| rng.gen_range(cfg.lo..cfg.hi)).collect(),
    )?;
    let requests: Vec<LineRequest> = (0..cfg.horizon)
        .map(|_| random_line_request(&mut rng, cfg.family, cfg.lo, cfg.hi))
        .collect();
    let opt = chasing_opt_line(&requests, &x0, &breakpoint_grid(&requests, &x0))?;
    let (mut x, mut y) = (x0.clone(), x0.clone());
    let mut trajectory = Trajectory::default();
    let mut violations = 0;
    for (f, ystep) in requests.iter().zip(&opt.trajectory.steps) {
        let step = chase_step(&x, f)?;
        let y_post = Configuration::new(&Line, ystep.post.clone())?;
        if !certify_step(&x, &step.post, &y, &y_post, f)? {
            violations += 1;
        }
        trajectory.push(
            x.positions(),
            step.post.positions(),
            step.service,
            step.movement,
        );
        x = step.post;
        y = y_post;
    }
    let y0 = Configuration::new(
        &Line,
        opt.trajectory
            .steps
            .first()
            .map_or(x0.positions().to_vec(), |s| s.pre.clone()),
    )?;
    let phi0 = potential(&x0, &y0)?.phi;
    let cost = trajectory.total();
    let bound = 4.0 * k as f64 * opt.value + phi0;
    Ok(LineRun {
        trial: LineTrial {
            seed: seeds.seed_u64(),
            k,
            cost,
            service: trajectory.service_total(),
            movement: trajectory.movement_total(),
            opt: opt.value,
            phi0,
            bound,
            bound_holds: cost <= bound + BOUND_TOL,
            certificate_violations: violations,
        },
        trajectory,
        requests,
    })
}

pub fn validate(cfg: &ChaseLineConfig) -> Result<()> {
    let ks = cfg.k.to_vec();
    require(
        !ks.is_empty() && ks.iter().all(|k| *k >= 1),
        "k must list positive server counts",
    )?;
    require(
        cfg.instances >= 1 && cfg.horizon >= 1,
        "instances and horizon must be positive",
    )?;
    require(
        cfg.lo < cfg.hi && cfg.lo.is_finite() && cfg.hi.is_finite(),
        "need finite lo < hi",
    )
}

pub fn chase_line(
    cfg: &ChaseLineConfig,
    seeds: &SeedTree,
) -> Result<(LineSummary, Vec<LineTrial>, Vec<Artifact>)> {
    validate(cfg)?;
    let ks = cfg.k.to_vec();
    let runs = (0..cfg.instances)
        .into_par_iter()
        .map(|i| run_instance(cfg, ks[i % ks.len()], &seeds.child("instance").child(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut artifacts = Vec::new();
    for (i, run) in runs.iter().take(cfg.trajectories).enumerate() {
        artifacts.push(Artifact::new(
            format!("trajectories/instance_{i}.csv"),
            run.trajectory.to_csv(&Line),
        ));
        artifacts.push(Artifact::jsonl(
            format!("requests/instance_{i}.jsonl"),
            &run.requests,
        ));
    }
    let trials: Vec<LineTrial> = runs.into_iter().map(|r| r.trial).collect();
    let ratios: Vec<f64> = trials
        .iter()
        .filter(|t| t.opt > 0.0)
        .map(|t| t.cost / t.opt)
        .collect();
    let summary = LineSummary {
        instances: trials.len(),
        bound_violations: trials.iter().filter(|t| !t.bound_holds).count(),
        certificate_violations: trials.iter().map(|t| t.certificate_violations).sum(),
        ratio: summarize(&ratios),
        worst_ratio: ratios.iter().copied().fold(0.0, f64::max),
    };
    Ok((summary, trials, artifacts))
}

pub fn chase_line_outcome(cfg: &ChaseLineConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, trials, artifacts) = chase_line(cfg, seeds)?;
    let trial_seeds = trials.iter().map(|t| t.seed).collect();
    Ok(Outcome::new(trial_seeds, &trials, &summary, artifacts))
}

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kchase::adversary::{pair_loss, BernoulliArms, MatrixOlo, PigeonholeEnvironment};
use kchase::regret::{
    ball_grid, default_spacing, ftl_topk, hedge_topk, line_grid, play, CandidateSet, Environment,
    Hedge, Oblivious, Played, Player, RegretCurve, TupleSpace,
};
use kchase::seed::Stream;
use kchase::SeedTree;

use crate::config::require;
use crate::error::Result;
use crate::report::{Artifact, Outcome};
use crate::stats::{fit_exponent, summarize, Fit, FitSample, Summary};

/// Bootstrap resamples behind every fitted band.
pub const FIT_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgeInstance {
    /// `x -> |x - y| / 2` on `[-1, 1]` with `y` uniform on `{-1, 0, 1}`.
    Piecewise,
    /// `x -> a (y - x)^+ + b (x - y)^+` on `[-1, 1]`, `y` uniform,
    /// slopes `a, b` uniform in `[0, 1/2]`.
    RandomVee,
    /// `x -> (x - y)^2` on `[0, 1]` with `y` uniform on `{0, 1/2, 1}`.
    WarmUp,
    /// The fixed loss `x -> x` on `[-1, 1]`.
    Linear,
    /// Pair losses `-|x . w|` from a random matrix instance on the unit ball.
    Matrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HedgeConfig {
    pub instance: HedgeInstance,
    pub k: usize,
    #[serde(default = "one")]
    pub dim: usize,
    /// Candidate count on the interval (one-dimensional instances).
    pub grid_points: Option<usize>,
    /// Lattice spacing on the ball (matrix instance); defaults to
    /// `1/ceil(sqrt(T))` for the largest horizon.
    pub spacing: Option<f64>,
    pub horizons: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub curves: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize)]
pub struct HorizonResult {
    pub horizon: usize,
    pub regret: Summary,
    /// `width * sqrt(T ln N / 2) + T * lipschitz * spacing`.
    pub bound: f64,
    pub mean_per_step_loss: f64,
    pub mean_per_step_opt: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegretSummary {
    pub tuples: usize,
    pub candidates: usize,
    pub spacing: f64,
    pub horizons: Vec<HorizonResult>,
    pub fit: Option<Fit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegretTrial {
    pub seed: u64,
    pub horizon: usize,
    pub regret: f64,
    pub opt_tuple: Vec<usize>,
}

struct Setup {
    candidates: CandidateSet,
    range: (f64, f64),
    lipschitz: f64,
    matrix: Option<MatrixOlo>,
}

fn setup(cfg: &HedgeConfig, seeds: &SeedTree) -> Result<Setup> {
    let horizon = cfg.horizons.iter().copied().max().unwrap_or(1);
    let points = cfg
        .grid_points
        .unwrap_or_else(|| (horizon as f64).sqrt().ceil() as usize + 1);
    Ok(match cfg.instance {
        HedgeInstance::Piecewise | HedgeInstance::RandomVee => Setup {
            candidates: line_grid(-1.0, 1.0, points)?,
            range: (0.0, 1.0),
            lipschitz: 0.5,
            matrix: None,
        },
        HedgeInstance::WarmUp => Setup {
            candidates: line_grid(0.0, 1.0, points)?,
            range: (0.0, 1.0),
            lipschitz: 2.0,
            matrix: None,
        },
        HedgeInstance::Linear => Setup {
            candidates: line_grid(-1.0, 1.0, points)?,
            range: (-1.0, 1.0),
            lipschitz: 1.0,
            matrix: None,
        },
        HedgeInstance::Matrix => {
            let mut rng = seeds.child("matrix").stream();
            let rows = (0..cfg.dim)
                .map(|_| (0..cfg.dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let spacing = cfg.spacing.unwrap_or_else(|| default_spacing(horizon));
            Setup {
                candidates: ball_grid(cfg.dim, spacing)?,
                range: (-1.0, 1.0),
                lipschitz: 1.0,
                matrix: Some(MatrixOlo::new(rows)?),
            }
        }
    })
}

/// One round's candidate losses for the oblivious instances.
fn draw(instance: HedgeInstance, setup: &Setup, rng: &mut Stream) -> Vec<f64> {
    let c = &setup.candidates;
    match instance {
        HedgeInstance::Piecewise => {
            let y = [-1.0, 0.0, 1.0][rng.gen_range(0..3)];
            c.losses(|x| 0.5 * (x[0] - y).abs())
        }
        HedgeInstance::RandomVee => {
            let y: f64 = rng.gen_range(-1.0..1.0);
            let (a, b): (f64, f64) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
            c.losses(|x| {
                if x[0] < y {
                    a * (y - x[0])
                } else {
                    b * (x[0] - y)
                }
            })
        }
        HedgeInstance::WarmUp => {
            let y = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
            c.losses(|x| (x[0] - y).powi(2))
        }
        HedgeInstance::Linear => c.linear_losses(&[1.0]),
        HedgeInstance::Matrix => {
            let w = setup.matrix.as_ref().expect("matrix instance").draw(rng);
            // Each candidate stands for the pair (x, -x).
            c.losses(|x| pair_loss(x, &w))
        }
    }
}

pub fn validate_hedge(cfg: &HedgeConfig) -> Result<()> {
    require(
        cfg.k >= 1 && cfg.trials >= 1,
        "k and trials must be positive",
    )?;
    require(
        !cfg.horizons.is_empty() && cfg.horizons.iter().all(|t| *t >= 1),
        "horizons must be positive",
    )?;
    let one_dim = cfg.instance != HedgeInstance::Matrix;
    require(
        !one_dim || cfg.dim == 1,
        "only the matrix instance has dim > 1",
    )?;
    require(
        cfg.grid_points.is_none_or(|g| g >= cfg.k),
        "grid_points must be at least k",
    )?;
    require(
        cfg.spacing.is_none_or(|s| s > 0.0 && s <= 1.0),
        "spacing must lie in (0, 1]",
    )
}

fn mean_curve(runs: &[&Played]) -> RegretCurve {
    let curves: Vec<&RegretCurve> = runs.iter().map(|p| &p.curve).collect();
    let len = curves[0].len();
    let n = curves.len() as f64;
    let avg = |f: &dyn Fn(&RegretCurve) -> &Vec<f64>| {
        (0..len)
            .map(|t| curves.iter().map(|c| f(c)[t]).sum::<f64>() / n)
            .collect()
    };
    RegretCurve {
        loss: avg(&|c| &c.loss),
        cum_loss: avg(&|c| &c.cum_loss),
        opt: avg(&|c| &c.opt),
        regret: avg(&|c| &c.regret),
    }
}

fn horizon_result(horizon: usize, runs: &[&Played], bound: f64) -> HorizonResult {
    let regrets: Vec<f64> = runs.iter().map(|p| p.curve.final_regret()).collect();
    let t = horizon as f64;
    HorizonResult {
        horizon,
        regret: summarize(&regrets),
        bound,
        mean_per_step_loss: runs
            .iter()
            .map(|p| p.curve.cum_loss[horizon - 1])
            .sum::<f64>()
            / runs.len() as f64
            / t,
        mean_per_step_opt: runs.iter().map(|p| p.curve.opt[horizon - 1]).sum::<f64>()
            / runs.len() as f64
            / t,
    }
}

fn fit_if_possible(
    horizons: &[usize],
    per_horizon: &[Vec<f64>],
    seeds: &SeedTree,
) -> Result<Option<Fit>> {
    if horizons.len() < 2 {
        return Ok(None);
    }
    let samples: Vec<FitSample> = horizons
        .iter()
        .zip(per_horizon)
        .map(|(h, v)| FitSample {
            horizon: *h as f64,
            values: v.clone(),
        })
        .collect();
    fit_exponent(&samples, FIT_RESAMPLES, &mut seeds.child("fit").stream()).map(Some)
}

pub type RegretResult = (RegretSummary, Vec<RegretTrial>, Vec<Artifact>);

pub fn regret_hedge(cfg: &HedgeConfig, seeds: &SeedTree) -> Result<RegretResult> {
    validate_hedge(cfg)?;
    let setup = setup(cfg, seeds)?;
    let space = TupleSpace::new(setup.candidates.len(), cfg.k)?;
    let width = setup.range.1 - setup.range.0;
    let mut trials = Vec::new();
    let mut results = Vec::new();
    let mut per_horizon = Vec::new();
    let mut artifacts = Vec::new();
    for &horizon in &cfg.horizons {
        let runs = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let s = seeds.child(format!("T={horizon}")).child(i);
                let mut losses = s.child("losses").stream();
                let mut env = Oblivious(|_| draw(cfg.instance, &setup, &mut losses));
                hedge_topk(
                    &setup.candidates,
                    cfg.k,
                    horizon,
                    setup.range,
                    &mut env,
                    &mut s.child("hedge").stream(),
                )
                .map(|p| (s.seed_u64(), p))
            })
            .collect::<kchase::Result<Vec<_>>>()?;
        let played: Vec<&Played> = runs.iter().map(|(_, p)| p).collect();
        let t = horizon as f64;
        let bound = width * (t * (space.len() as f64).ln() / 2.0).sqrt()
            + t * setup.lipschitz * setup.candidates.spacing;
        results.push(horizon_result(horizon, &played, bound));
        per_horizon.push(played.iter().map(|p| p.curve.final_regret()).collect());
        if cfg.curves {
            artifacts.push(Artifact::new(
                format!("curves/hedge_T{horizon}.csv"),
                mean_curve(&played).to_csv(),
            ));
        }
        trials.extend(runs.iter().map(|(seed, p)| RegretTrial {
            seed: *seed,
            horizon,
            regret: p.curve.final_regret(),
            opt_tuple: space.members(p.opt_tuple),
        }));
    }
    let summary = RegretSummary {
        tuples: space.len(),
        candidates: setup.candidates.len(),
        spacing: setup.candidates.spacing,
        fit: fit_if_possible(&cfg.horizons, &per_horizon, seeds)?,
        horizons: results,
    };
    Ok((summary, trials, artifacts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FtlInstance {
    /// Adaptive losses `x -> |x - y|^p` on `[0, 1]` placing `y` at distance
    /// at least `1/(2k)` from every played point.
    Pigeonhole,
    /// `x -> ±w x` on `[-1, 1]`, sign uniform.
    SymmetricNoise,
    /// `x -> (y - 1/2) x` on `[-1, 1]`, `y` uniform on `{0, 1/2, 1}`.
    ThreePoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FtlConfig {
    pub instance: FtlInstance,
    pub k: usize,
    pub grid_points: usize,
    pub horizons: Vec<usize>,
    pub trials: usize,
    #[serde(default = "unit")]
    pub weight: f64,
    /// Exponent `p` of the pigeonhole profile `u -> u^p`.
    #[serde(default = "unit")]
    pub profile_exponent: f64,
    #[serde(default)]
    pub curves: bool,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize)]
pub struct FtlSummary {
    pub regret: RegretSummary,
    /// Smallest per-round loss over every round of every trial.
    pub min_step_loss: f64,
    /// The pigeonhole floor `(1/(2k))^p`, when that instance ran.
    pub step_loss_floor: Option<f64>,
}

pub fn validate_ftl(cfg: &FtlConfig) -> Result<()> {
    require(
        cfg.k >= 1 && cfg.trials >= 1,
        "k and trials must be positive",
    )?;
    require(cfg.grid_points >= cfg.k, "grid_points must be at least k")?;
    require(
        !cfg.horizons.is_empty() && cfg.horizons.iter().all(|t| *t >= 1),
        "horizons must be positive",
    )?;
    require(
        cfg.profile_exponent >= 1.0,
        "profile_exponent must be at least 1",
    )?;
    require(cfg.weight.abs() <= 1.0, "linear losses need |weight| <= 1")
}

/// Follow-the-leader ignores the horizon, so one run to the longest
/// horizon gives every shorter horizon as a prefix.
pub fn regret_ftl(
    cfg: &FtlConfig,
    seeds: &SeedTree,
) -> Result<(FtlSummary, Vec<RegretTrial>, Vec<Artifact>)> {
    validate_ftl(cfg)?;
    let longest = *cfg.horizons.iter().max().expect("validated");
    let runs = (0..cfg.trials)
        .into_par_iter()
        .map(|i| -> Result<(u64, usize, Played)> {
            let s = seeds.child("trial").child(i);
            match cfg.instance {
                FtlInstance::Pigeonhole => {
                    // A deterministic game: trials differ by grid size only.
                    let g = cfg.grid_points + 2 * i;
                    let grid = line_grid(0.0, 1.0, g)?;
                    let p = cfg.profile_exponent;
                    let mut env =
                        PigeonholeEnvironment::new(cfg.k, grid.clone(), move |u: f64| u.powf(p));
                    Ok((s.seed_u64(), g, ftl_topk(&grid, cfg.k, longest, &mut env)?))
                }
                FtlInstance::SymmetricNoise | FtlInstance::ThreePoint => {
                    let grid = line_grid(-1.0, 1.0, cfg.grid_points)?;
                    let mut rng = s.child("losses").stream();
                    let instance = cfg.instance;
                    let w = cfg.weight;
                    let mut env = Oblivious(|_| match instance {
                        FtlInstance::SymmetricNoise => {
                            grid.linear_losses(&[if rng.gen::<bool>() { w } else { -w }])
                        }
                        _ => grid.linear_losses(&[[0.0, 0.5, 1.0][rng.gen_range(0..3)] - 0.5]),
                    });
                    Ok((
                        s.seed_u64(),
                        cfg.grid_points,
                        ftl_topk(&grid, cfg.k, longest, &mut env)?,
                    ))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut results = Vec::new();
    let mut per_horizon = Vec::new();
    let mut trials = Vec::new();
    for &h in &cfg.horizons {
        let played: Vec<&Played> = runs.iter().map(|(_, _, p)| p).collect();
        let finals: Vec<f64> = played.iter().map(|p| p.curve.regret[h - 1]).collect();
        let mut r = horizon_result(h, &played, f64::NAN);
        r.regret = summarize(&finals);
        // No guarantee applies to the leader; report the trivial bound T.
        r.bound = h as f64;
        results.push(r);
        per_horizon.push(finals.clone());
        for ((seed, g, p), reg) in runs.iter().zip(&finals) {
            let space = TupleSpace::new(*g, cfg.k)?;
            trials.push(RegretTrial {
                seed: *seed,
                horizon: h,
                regret: *reg,
                opt_tuple: space.members(p.opt_tuple),
            });
        }
    }
    let mut artifacts = Vec::new();
    if cfg.curves {
        artifacts.push(Artifact::new(
            "curves/ftl_trial0.csv",
            runs[0].2.curve.to_csv(),
        ));
    }
    let min_step_loss = runs
        .iter()
        .flat_map(|(_, _, p)| p.curve.loss.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let summary = FtlSummary {
        regret: RegretSummary {
            tuples: TupleSpace::new(cfg.grid_points, cfg.k)?.len(),
            candidates: cfg.grid_points,
            spacing: 1.0 / (cfg.grid_points.max(2) - 1) as f64,
            fit: fit_if_possible(&cfg.horizons, &per_horizon, seeds)?,
            horizons: results,
        },
        min_step_loss,
        step_loss_floor: (cfg.instance == FtlInstance::Pigeonhole)
            .then(|| (1.0 / (2.0 * cfg.k as f64)).powf(cfg.profile_exponent)),
    };
    Ok((summary, trials, artifacts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetInstance {
    /// Every arm loses 1 with probability `1 - 1/k`.
    Bernoulli,
    /// Arms 0 and 1 take turns being the only free arm.
    SingleGood,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetsConfig {
    pub instance: SubsetInstance,
    pub arms: usize,
    pub k: usize,
    pub horizon: usize,
    pub trials: usize,
    #[serde(default)]
    pub curves: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetsSummary {
    pub regret: Summary,
    /// `sqrt(T ln(n choose k) / 2)`.
    pub bound: f64,
    /// Realized per-round loss of the fixed subset `{0, .., k-1}`.
    pub fixed_subset_loss: Summary,
    pub fixed_subset_expected: Option<f64>,
    pub degenerate: bool,
    /// Largest Hedge weight after half the horizon.
    pub max_weight_at_half: Summary,
}

struct SubsetEnv<'a> {
    instance: SubsetInstance,
    arms: &'a BernoulliArms,
    rng: Stream,
    fixed_total: f64,
}

impl Environment for SubsetEnv<'_> {
    fn losses(&mut self, t: usize, _: &[usize]) -> Vec<f64> {
        let l = match self.instance {
            SubsetInstance::Bernoulli => self.arms.draw(&mut self.rng),
            SubsetInstance::SingleGood => (0..self.arms.arms)
                .map(|i| if i == t % 2 { 0.0 } else { 1.0 })
                .collect(),
        };
        self.fixed_total += l[..self.arms.k]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        l
    }
}

pub fn validate_subsets(cfg: &SubsetsConfig) -> Result<()> {
    require(cfg.k >= 1 && cfg.arms >= cfg.k, "need 1 <= k <= arms")?;
    require(
        cfg.horizon >= 2 && cfg.trials >= 1,
        "horizon must be at least 2 and trials positive",
    )?;
    require(
        cfg.instance != SubsetInstance::SingleGood || cfg.arms >= 2,
        "single_good needs two arms",
    )
}

/// Hedge with a snapshot of its largest weight after a given round.
struct Watched {
    hedge: Hedge,
    seen: usize,
    at: usize,
    max_weight: f64,
}

impl Player for Watched {
    fn space(&self) -> &TupleSpace {
        self.hedge.space()
    }

    fn choose(&mut self, rng: &mut Stream) -> usize {
        self.hedge.choose(rng)
    }

    fn observe(&mut self, losses: &[f64]) {
        self.hedge.observe(losses);
        self.seen += 1;
        if self.seen == self.at {
            self.max_weight = self.hedge.weights().iter().copied().fold(0.0, f64::max);
        }
    }
}

pub fn regret_subsets(
    cfg: &SubsetsConfig,
    seeds: &SeedTree,
) -> Result<(SubsetsSummary, Vec<RegretTrial>, Vec<Artifact>)> {
    validate_subsets(cfg)?;
    let arms = BernoulliArms::new(cfg.arms, cfg.k)?;
    let runs = (0..cfg.trials)
        .into_par_iter()
        .map(|i| -> kchase::Result<(u64, Played, f64, f64)> {
            let s = seeds.child("trial").child(i);
            let mut env = SubsetEnv {
                instance: cfg.instance,
                arms: &arms,
                rng: s.child("losses").stream(),
                fixed_total: 0.0,
            };
            let hedge = Hedge::new(TupleSpace::new(cfg.arms, cfg.k)?, cfg.horizon, (0.0, 1.0))?;
            let mut player = Watched {
                hedge,
                seen: 0,
                at: cfg.horizon / 2,
                max_weight: 0.0,
            };
            let played = play(
                &mut player,
                &mut env,
                cfg.horizon,
                &mut s.child("hedge").stream(),
            )?;
            Ok((
                s.seed_u64(),
                played,
                env.fixed_total / cfg.horizon as f64,
                player.max_weight,
            ))
        })
        .collect::<kchase::Result<Vec<_>>>()?;
    let space = TupleSpace::new(cfg.arms, cfg.k)?;
    let regrets: Vec<f64> = runs.iter().map(|r| r.1.curve.final_regret()).collect();
    let fixed: Vec<f64> = runs.iter().map(|r| r.2).collect();
    let weights: Vec<f64> = runs.iter().map(|r| r.3).collect();
    let trials = runs
        .iter()
        .map(|(seed, p, _, _)| RegretTrial {
            seed: *seed,
            horizon: cfg.horizon,
            regret: p.curve.final_regret(),
            opt_tuple: space.members(p.opt_tuple),
        })
        .collect();
    let mut artifacts = Vec::new();
    if cfg.curves {
        let played: Vec<&Played> = runs.iter().map(|r| &r.1).collect();
        artifacts.push(Artifact::new(
            "curves/subsets_mean.csv",
            mean_curve(&played).to_csv(),
        ));
    }
    let summary = SubsetsSummary {
        regret: summarize(&regrets),
        bound: (cfg.horizon as f64 * (space.len() as f64).ln() / 2.0).sqrt(),
        fixed_subset_loss: summarize(&fixed),
        fixed_subset_expected: (cfg.instance == SubsetInstance::Bernoulli)
            .then(|| arms.subset_expected_loss()),
        degenerate: cfg.instance == SubsetInstance::Bernoulli && arms.degenerate(),
        max_weight_at_half: summarize(&weights),
    };
    Ok((summary, trials, artifacts))
}

pub fn regret_hedge_outcome(cfg: &HedgeConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, trials, artifacts) = regret_hedge(cfg, seeds)?;
    Ok(Outcome::new(
        trials.iter().map(|t| t.seed).collect(),
        &trials,
        &summary,
        artifacts,
    ))
}

pub fn regret_ftl_outcome(cfg: &FtlConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, trials, artifacts) = regret_ftl(cfg, seeds)?;
    Ok(Outcome::new(
        trials.iter().map(|t| t.seed).collect(),
        &trials,
        &summary,
        artifacts,
    ))
}

pub fn regret_subsets_outcome(cfg: &SubsetsConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, trials, artifacts) = regret_subsets(cfg, seeds)?;
    Ok(Outcome::new(
        trials.iter().map(|t| t.seed).collect(),
        &trials,
        &summary,
        artifacts,
    ))
}

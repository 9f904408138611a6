use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kchase::adversary::{
    cluster_instance, gadget_feasible_pairs, interval_union_from_kserver, pair_loss,
    reinterpretation_cost, run_gadget_game, BernoulliArms, ClusterInstance, DoubleCoveragePlanar,
    GadgetGame, GreedyPlanar, IntervalUnion, MatrixOlo, PlanarChaser, PlanarGadget, Point2,
};
use kchase::seed::Stream;
use kchase::SeedTree;

use crate::config::require;
use crate::error::Result;
use crate::report::{Artifact, Outcome};
use crate::stats::{summarize, Summary};

/// The lower-bound constructions, selected by the `construction` key.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case", deny_unknown_fields)]
pub enum LowerBoundConfig {
    /// Random gadgets swept on a lattice, then the gadget game against the
    /// deterministic planar baselines.
    Gadget {
        #[serde(default = "default_gadgets")]
        gadgets: usize,
        #[serde(default = "default_resolution")]
        resolution: f64,
        n: usize,
        rounds: usize,
        #[serde(default = "default_reps")]
        reps: usize,
    },
    /// The interval-union request for every point of `{1..n}` plus the
    /// reinterpretation cost of random positions.
    Interval {
        n: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// The k-means packing instance and a sampled request stream.
    Cluster {
        k: usize,
        dim: usize,
        horizon: usize,
    },
    /// Monte Carlo check of the expected pair loss on random matrices.
    Matrix {
        dim: usize,
        #[serde(default = "default_matrices")]
        matrices: usize,
        #[serde(default = "default_points")]
        points: usize,
        draws: usize,
        /// How many drawn loss vectors go to the request stream file.
        #[serde(default = "default_stream")]
        stream: usize,
    },
    /// Fixed-subset loss on the Bernoulli arms instance.
    Bandit {
        arms: usize,
        k: usize,
        horizon: usize,
        #[serde(default = "default_stream")]
        stream: usize,
    },
}

fn default_gadgets() -> usize {
    20
}
fn default_resolution() -> f64 {
    0.01
}
fn default_reps() -> usize {
    3
}
fn default_samples() -> usize {
    1000
}
fn default_matrices() -> usize {
    5
}
fn default_points() -> usize {
    20
}
fn default_stream() -> usize {
    1000
}

impl LowerBoundConfig {
    pub fn construction(&self) -> &'static str {
        match self {
            LowerBoundConfig::Gadget { .. } => "gadget",
            LowerBoundConfig::Interval { .. } => "interval",
            LowerBoundConfig::Cluster { .. } => "cluster",
            LowerBoundConfig::Matrix { .. } => "matrix",
            LowerBoundConfig::Bandit { .. } => "bandit",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GadgetSweep {
    pub gadget: PlanarGadget,
    pub feasible_pairs: usize,
    pub category_a: usize,
    pub category_b: usize,
    pub outliers: usize,
    pub two_categories: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameSummary {
    pub baseline: &'static str,
    pub online_cost: f64,
    pub offline_cost: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixCheck {
    pub matrix: usize,
    pub point: Vec<f64>,
    pub expected: f64,
    pub mean: f64,
    pub std_error: f64,
    /// `|mean - expected|` in standard errors.
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum LowerBoundSummary {
    Gadget {
        sweeps: Vec<GadgetSweep>,
        all_two_categories: bool,
        games: Vec<GameSummary>,
    },
    Interval {
        n: usize,
        unions: Vec<IntervalUnion>,
        /// Smallest distance from a position standing for `i` to the union
        /// requested for `i`.
        min_eviction: f64,
        max_reinterpretation: f64,
    },
    Cluster {
        regions: usize,
        points: usize,
        separation: f64,
        /// Cost of serving the sampled stream with one centre per region.
        region_cost: f64,
    },
    Matrix {
        checks: Vec<MatrixCheck>,
        max_z: f64,
    },
    Bandit {
        degenerate: bool,
        expected: f64,
        fixed_subset_loss: Summary,
    },
}

fn random_gadget(rng: &mut Stream, resolution: f64) -> Result<PlanarGadget> {
    let steps = (1.0 / resolution).round() as u32;
    let mut cuts: Vec<u32> = Vec::new();
    while cuts.len() < 4 {
        let c = rng.gen_range(0..=steps);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let [a1, a2, b1, b2] = [0, 1, 2, 3].map(|i| cuts[i] as f64 / steps as f64);
    Ok(PlanarGadget::new(a1, a2, b1, b2)?)
}

/// Both baselines start stacked over the first point's cell.
pub fn gadget_start(n: usize) -> [Point2; 2] {
    let x0 = 0.5 / (2 * n - 1) as f64;
    [[x0, 0.0], [x0, 1.0]]
}

fn game_summary(baseline: &'static str, g: &GadgetGame) -> GameSummary {
    GameSummary {
        baseline,
        online_cost: g.online_cost,
        offline_cost: g.offline_cost,
        ratio: g.ratio,
    }
}

fn gadget(
    gadgets: usize,
    resolution: f64,
    n: usize,
    rounds: usize,
    reps: usize,
    seeds: &SeedTree,
) -> Result<(LowerBoundSummary, Vec<Artifact>)> {
    require(
        resolution > 0.0 && resolution <= 0.25,
        "resolution must lie in (0, 0.25]",
    )?;
    require(n >= 2 && rounds >= 1, "need n >= 2 and at least one round")?;
    let mut rng = seeds.child("gadgets").stream();
    let tuples = (0..gadgets)
        .map(|_| random_gadget(&mut rng, resolution))
        .collect::<Result<Vec<_>>>()?;
    let sweeps = tuples
        .par_iter()
        .map(|g| {
            gadget_feasible_pairs(g, resolution).map(|c| GadgetSweep {
                gadget: *g,
                feasible_pairs: c.feasible_pairs,
                category_a: c.category_a,
                category_b: c.category_b,
                outliers: c.outlier_count,
                two_categories: c.exactly_two_categories(),
            })
        })
        .collect::<kchase::Result<Vec<_>>>()?;
    let mut baselines: Vec<(&'static str, Box<dyn PlanarChaser + Send>)> = vec![
        (
            "greedy",
            Box::new(GreedyPlanar {
                servers: gadget_start(n),
            }),
        ),
        (
            "double_coverage",
            Box::new(DoubleCoveragePlanar {
                servers: gadget_start(n),
            }),
        ),
    ];
    let mut games = Vec::new();
    let mut artifacts = Vec::new();
    for (name, chaser) in baselines.iter_mut() {
        let game = run_gadget_game(chaser.as_mut(), n, rounds, reps)?;
        games.push(game_summary(name, &game));
        artifacts.push(Artifact::jsonl(
            format!("requests/gadget_{name}.jsonl"),
            &game.rounds,
        ));
    }
    Ok((
        LowerBoundSummary::Gadget {
            all_two_categories: sweeps.iter().all(|s| s.two_categories),
            sweeps,
            games,
        },
        artifacts,
    ))
}

fn interval(
    n: usize,
    samples: usize,
    seeds: &SeedTree,
) -> Result<(LowerBoundSummary, Vec<Artifact>)> {
    require(n >= 2, "need n >= 2")?;
    let unions = (1..=n)
        .map(|i| interval_union_from_kserver(n, i))
        .collect::<kchase::Result<Vec<_>>>()?;
    let m = (2 * n - 1) as f64;
    // Positions standing for `i` span `[(2i-2.5)/m, (2i-0.5)/m]`; the union for
    // `i` leaves out the middle cell and half of each neighbour.
    let mut min_eviction = f64::INFINITY;
    for (idx, u) in unions.iter().enumerate() {
        let i = idx + 1;
        let centre = (2.0 * i as f64 - 1.5) / m;
        min_eviction = min_eviction.min((u.project(centre) - centre).abs());
    }
    let mut rng = seeds.child("positions").stream();
    let mut max_reinterpretation: f64 = 0.0;
    for _ in 0..samples {
        let x: f64 = rng.gen();
        let j = rng.gen_range(1..=n);
        max_reinterpretation = max_reinterpretation.max(reinterpretation_cost(n, x, j));
    }
    let artifacts = vec![Artifact::jsonl("requests/interval_unions.jsonl", &unions)];
    Ok((
        LowerBoundSummary::Interval {
            n,
            unions,
            min_eviction,
            max_reinterpretation,
        },
        artifacts,
    ))
}

fn cluster(
    k: usize,
    dim: usize,
    horizon: usize,
    seeds: &SeedTree,
) -> Result<(LowerBoundSummary, Vec<Artifact>)> {
    let inst = cluster_instance(k, dim)?;
    let mut rng = seeds.child("stream").stream();
    let stream: Vec<Vec<f64>> = (0..horizon)
        .map(|_| inst.sample(&mut rng).to_vec())
        .collect();
    let centres: Vec<Vec<f64>> = inst
        .regions
        .iter()
        .map(|r| {
            let pts: Vec<&[f64]> = r.iter().map(|&i| inst.points[i].as_slice()).collect();
            (0..dim)
                .map(|c| pts.iter().map(|p| p[c]).sum::<f64>() / pts.len() as f64)
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = stream.iter().map(Vec::as_slice).collect();
    let summary = LowerBoundSummary::Cluster {
        regions: inst.regions.len(),
        points: inst.points.len(),
        separation: inst.separation,
        region_cost: ClusterInstance::cost(&centres, &refs),
    };
    Ok((
        summary,
        vec![Artifact::jsonl("requests/cluster.jsonl", &stream)],
    ))
}

/// Uniform point of the unit ball by rejection from the cube.
fn ball_point(rng: &mut Stream, dim: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return x;
        }
    }
}

/// Monte Carlo mean of the pair loss at `x` and its standard error.
pub fn pair_loss_estimate(
    inst: &MatrixOlo,
    x: &[f64],
    draws: usize,
    rng: &mut Stream,
) -> (f64, f64) {
    let values: Vec<f64> = (0..draws).map(|_| pair_loss(x, &inst.draw(rng))).collect();
    let mean = values.iter().sum::<f64>() / draws as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws.max(2) - 1) as f64;
    (mean, (var / draws as f64).sqrt())
}

fn matrix(
    dim: usize,
    matrices: usize,
    points: usize,
    draws: usize,
    stream: usize,
    seeds: &SeedTree,
) -> Result<(LowerBoundSummary, Vec<Artifact>)> {
    require(
        dim >= 1 && matrices >= 1 && points >= 1 && draws >= 2,
        "matrix construction needs positive sizes and draws >= 2",
    )?;
    let mut checks = Vec::new();
    let mut requests = Vec::new();
    for m in 0..matrices {
        let s = seeds.child("matrix").child(m);
        let mut rng = s.child("entries").stream();
        let rows = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let inst = MatrixOlo::new(rows)?;
        let xs: Vec<Vec<f64>> = (0..points).map(|_| ball_point(&mut rng, dim)).collect();
        let found: Vec<MatrixCheck> = xs
            .par_iter()
            .enumerate()
            .map(|(p, x)| {
                let mut r = s.child("draws").child(p).stream();
                let (mean, std_error) = pair_loss_estimate(&inst, x, draws, &mut r);
                let expected = inst.expected_pair_loss(x);
                let z = if std_error > 0.0 {
                    (mean - expected).abs() / std_error
                } else {
                    0.0
                };
                MatrixCheck {
                    matrix: m,
                    point: x.clone(),
                    expected,
                    mean,
                    std_error,
                    z,
                }
            })
            .collect();
        checks.extend(found);
        if m == 0 {
            let mut r = s.child("stream").stream();
            requests = (0..stream).map(|_| inst.draw(&mut r)).collect();
        }
    }
    let max_z = checks.iter().map(|c| c.z).fold(0.0, f64::max);
    Ok((
        LowerBoundSummary::Matrix { checks, max_z },
        vec![Artifact::jsonl("requests/matrix.jsonl", &requests)],
    ))
}

fn bandit(
    arms: usize,
    k: usize,
    horizon: usize,
    stream: usize,
    seeds: &SeedTree,
) -> Result<(LowerBoundSummary, Vec<Artifact>)> {
    require(horizon >= 1, "horizon must be positive")?;
    let inst = BernoulliArms::new(arms, k)?;
    let mut rng = seeds.child("losses").stream();
    let mut per_step = Vec::with_capacity(horizon);
    let mut requests = Vec::new();
    for t in 0..horizon {
        let l = inst.draw(&mut rng);
        per_step.push(l[..k].iter().copied().fold(f64::INFINITY, f64::min));
        if t < stream {
            requests.push(l);
        }
    }
    let summary = LowerBoundSummary::Bandit {
        degenerate: inst.degenerate(),
        expected: inst.subset_expected_loss(),
        fixed_subset_loss: summarize(&per_step),
    };
    Ok((
        summary,
        vec![Artifact::jsonl("requests/bandit.jsonl", &requests)],
    ))
}

pub fn lowerbound(
    cfg: &LowerBoundConfig,
    seeds: &SeedTree,
) -> Result<(LowerBoundSummary, Vec<Artifact>)> {
    match *cfg {
        LowerBoundConfig::Gadget {
            gadgets,
            resolution,
            n,
            rounds,
            reps,
        } => gadget(gadgets, resolution, n, rounds, reps, seeds),
        LowerBoundConfig::Interval { n, samples } => interval(n, samples, seeds),
        LowerBoundConfig::Cluster { k, dim, horizon } => cluster(k, dim, horizon, seeds),
        LowerBoundConfig::Matrix {
            dim,
            matrices,
            points,
            draws,
            stream,
        } => matrix(dim, matrices, points, draws, stream, seeds),
        LowerBoundConfig::Bandit {
            arms,
            k,
            horizon,
            stream,
        } => bandit(arms, k, horizon, stream, seeds),
    }
}

pub fn lowerbound_outcome(cfg: &LowerBoundConfig, seeds: &SeedTree) -> Result<Outcome> {
    let (summary, artifacts) = lowerbound(cfg, seeds)?;
    Ok(Outcome::new(
        vec![seeds.seed_u64()],
        &Vec::<()>::new(),
        &summary,
        artifacts,
    ))
}

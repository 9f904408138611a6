//! Online k-median through k-server: the randomized filter, blind charging,
//! and Monte Carlo verification of the filter's cost chain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{serve_cost, Configuration};
use crate::error::{invalid, Result};
use crate::kserver::{kserver_opt, KServer, WorkFunctionAlgorithm};
use crate::metric::{FiniteMetric, Metric};
use crate::online::{Chaser, StepRecord};
use crate::oracles::chasing_opt_finite;
use crate::request::{Centered, CostFunction};
use crate::seed::{SeedTree, Stream};

/// `c * dist(x, center)` with `0 < c <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianRequest<P> {
    c: f64,
    center: P,
}

impl<P> MedianRequest<P> {
    pub fn new(c: f64, center: P) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return invalid(format!("k-median weight {c} must lie in (0, 1]"));
        }
        Ok(Self { c, center })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl<P> Centered<P> for MedianRequest<P> {
    fn center(&self) -> &P {
        &self.center
    }
}

impl<M: Metric> CostFunction<M> for MedianRequest<M::Point> {
    fn value(&self, metric: &M, x: &M::Point) -> f64 {
        self.c * metric.dist(x, &self.center)
    }

    fn minimizer(&self, _: &M) -> Option<M::Point> {
        Some(self.center.clone())
    }

    fn lipschitz_bound(&self) -> f64 {
        self.c
    }
}

/// Splits a weight `c > 1` into `ceil(c)` equal requests of weight `<= 1`.
pub fn split_heavy<P: Clone>(c: f64, center: P) -> Result<Vec<MedianRequest<P>>> {
    if !(c > 0.0 && c.is_finite()) {
        return invalid(format!("k-median weight {c} must be positive and finite"));
    }
    let copies = c.ceil().max(1.0);
    (0..copies as usize)
        .map(|_| MedianRequest::new(c / copies, center.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub passed: bool,
    pub coin: f64,
}

/// Whether `post` equals `pre` or `pre` with exactly one server relocated
/// to `center`.
pub fn is_move_to_minimum<M: Metric>(
    metric: &M,
    pre: &Configuration<M::Point>,
    post: &Configuration<M::Point>,
    center: &M::Point,
) -> bool {
    post == pre || (0..pre.k()).any(|i| pre.with_moved(metric, i, center.clone()) == *post)
}

/// Passes request `(c, z)` to the k-server backend with probability `c`
/// (one coin per step), otherwise ignores it. Service is paid by the
/// nearest server after the step. Passed requests at an occupied center are
/// not forwarded.
#[derive(Debug, Clone)]
pub struct RandomizedFilter<A> {
    backend: A,
    coins: Stream,
    last: Option<FilterDecision>,
}

impl<A> RandomizedFilter<A> {
    pub fn new(backend: A, coins: Stream) -> Self {
        Self {
            backend,
            coins,
            last: None,
        }
    }

    pub fn backend(&self) -> &A {
        &self.backend
    }

    pub fn last_decision(&self) -> Option<FilterDecision> {
        self.last
    }

    /// Consumes this step's coin without consulting the backend, keeping
    /// coin `t` tied to step `t` when a caller serves a step itself.
    pub fn skip(&mut self) {
        let coin: f64 = self.coins.gen();
        self.last = Some(FilterDecision {
            passed: false,
            coin,
        });
    }
}

impl<M: Metric, A: KServer<M>> Chaser<M, MedianRequest<M::Point>> for RandomizedFilter<A> {
    fn configuration(&self) -> &Configuration<M::Point> {
        self.backend.configuration()
    }

    fn respond(
        &mut self,
        metric: &M,
        request: &MedianRequest<M::Point>,
    ) -> Result<StepRecord<M::Point>> {
        let pre = self.backend.configuration().clone();
        let coin: f64 = self.coins.gen();
        let passed = coin < request.c;
        self.last = Some(FilterDecision { passed, coin });
        // A covered center needs no service; leaving the backend untouched
        // keeps its state a function of the uncovered passed requests only.
        let movement = if passed && !pre.contains(&request.center) {
            self.backend.serve(metric, &request.center)?
        } else {
            0.0
        };
        let post = self.backend.configuration().clone();
        let service = serve_cost(metric, &post, request);
        Ok(StepRecord {
            pre,
            post,
            service,
            movement,
        })
    }
}

/// Charges each request at the configuration held before the step.
///
/// For 1-Lipschitz requests `f(pre) <= f(post) + movement`, so blind
/// charging at most doubles the cost; the inequality is asserted per step.
#[derive(Debug, Clone)]
pub struct Blind<C> {
    inner: C,
}

impl<C> Blind<C> {
    pub fn new(inner: C) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    pub fn into_inner(self) -> C {
        self.inner
    }
}

impl<M, R, C> Chaser<M, R> for Blind<C>
where
    M: Metric,
    R: CostFunction<M>,
    C: Chaser<M, R>,
{
    fn configuration(&self) -> &Configuration<M::Point> {
        self.inner.configuration()
    }

    fn respond(&mut self, metric: &M, request: &R) -> Result<StepRecord<M::Point>> {
        let lip = request.lipschitz_bound();
        if lip > 1.0 + 1e-12 {
            return invalid(format!(
                "blind charging needs 1-Lipschitz requests, got bound {lip}"
            ));
        }
        let step = self.inner.respond(metric, request)?;
        let blind = serve_cost(metric, &step.pre, request);
        assert!(
            blind <= step.service + step.movement + 1e-9,
            "blind service {blind} exceeds service {} + movement {}",
            step.service,
            step.movement
        );
        Ok(StepRecord {
            service: blind,
            ..step
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Charging {
    Standard,
    Blind,
}

/// A fixed k-median request sequence on a finite metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianInstance {
    pub metric: FiniteMetric,
    pub requests: Vec<MedianRequest<usize>>,
    pub start: Configuration<usize>,
}

/// One filtered run with the work function backend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterRun {
    pub cost: f64,
    pub server_cost: f64,
    pub passed: Vec<usize>,
    pub mtm_violations: usize,
    pub steps: Vec<StepRecord<usize>>,
}

type WfaFilter = RandomizedFilter<WorkFunctionAlgorithm>;

/// Runs the filter over the work function algorithm with coins drawn from
/// `coins`, under the given charging mode.
pub fn run_filtered_wfa(
    instance: &MedianInstance,
    charging: Charging,
    coins: Stream,
) -> Result<FilterRun> {
    let backend = WorkFunctionAlgorithm::new(&instance.metric, &instance.start)?;
    let filter = RandomizedFilter::new(backend, coins);
    match charging {
        Charging::Standard => drive(instance, filter, |f: &WfaFilter| f.last_decision()),
        Charging::Blind => drive(instance, Blind::new(filter), |b: &Blind<WfaFilter>| {
            b.inner().last_decision()
        }),
    }
}

fn drive<C>(
    instance: &MedianInstance,
    mut alg: C,
    decision: impl Fn(&C) -> Option<FilterDecision>,
) -> Result<FilterRun>
where
    C: Chaser<FiniteMetric, MedianRequest<usize>>,
{
    let mut run = FilterRun {
        cost: 0.0,
        server_cost: 0.0,
        passed: Vec::new(),
        mtm_violations: 0,
        steps: Vec::with_capacity(instance.requests.len()),
    };
    for r in &instance.requests {
        let step = alg.respond(&instance.metric, r)?;
        if decision(&alg).is_some_and(|d| d.passed) {
            run.passed.push(r.center);
        }
        if !is_move_to_minimum(&instance.metric, &step.pre, &step.post, &r.center) {
            run.mtm_violations += 1;
        }
        run.cost += step.service + step.movement;
        run.server_cost += step.movement;
        run.steps.push(step);
    }
    Ok(run)
}

/// Outcome of a one-sided test at 99% confidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// Too few trials for the requested confidence; never counted as a pass.
    Underpowered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFlags {
    /// `E[cost(filter)] <= 2 E[cost(server backend)]`.
    pub filter_vs_server: Verdict,
    /// `E[cost(server backend)] <= (2k-1) E[OPT(passed)] + k * diameter`.
    pub server_vs_server_opt: Verdict,
    /// `E[OPT(passed)] <= 2 OPT(full instance)`.
    pub server_opt_vs_opt: Verdict,
}

impl ChainFlags {
    pub fn all_hold(&self) -> bool {
        [
            self.filter_vs_server,
            self.server_vs_server_opt,
            self.server_opt_vs_opt,
        ]
        .iter()
        .all(|v| *v == Verdict::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub trials: usize,
    pub opt_full: f64,
    pub mean_filter_cost: f64,
    pub mean_server_cost: f64,
    pub mean_server_opt: f64,
    /// Per-trial `cost(filter) / OPT(full)`; empty when `OPT(full) = 0`.
    pub ratios: Vec<f64>,
    pub flags: ChainFlags,
    pub mtm_violations: usize,
}

/// Fewest trials for which the normal approximation behind the 99% slack
/// is accepted.
pub const MIN_CHAIN_TRIALS: usize = 30;
/// One-sided 99% standard normal quantile.
pub const Z99: f64 = 2.576;

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `mean(xs) <= 0` up to 99% sampling slack.
fn nonpositive_mean(xs: &[f64], trials: usize) -> Verdict {
    if trials < MIN_CHAIN_TRIALS {
        return Verdict::Underpowered;
    }
    let (mean, se) = mean_se(xs);
    if mean <= Z99 * se + 1e-9 {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

/// Monte Carlo check of the filter's cost chain on a fixed instance. Trial
/// `i` draws its coins from `seeds.child(i)`. Differences are paired per
/// trial so the slack reflects the variance of the difference.
pub fn verify_cost_chain(
    instance: &MedianInstance,
    charging: Charging,
    trials: usize,
    seeds: &SeedTree,
) -> Result<ChainReport> {
    if trials == 0 {
        return invalid("verify_cost_chain needs at least one trial");
    }
    let opt_full = chasing_opt_finite(&instance.metric, &instance.requests, &instance.start)?;
    let k = instance.start.k() as f64;
    let additive = k * instance.metric.diameter();
    let mut filter = Vec::with_capacity(trials);
    let mut server = Vec::with_capacity(trials);
    let mut server_opt = Vec::with_capacity(trials);
    let mut mtm_violations = 0;
    for i in 0..trials {
        let run = run_filtered_wfa(instance, charging, seeds.child(i).stream())?;
        filter.push(run.cost);
        server.push(run.server_cost);
        server_opt.push(kserver_opt(&instance.metric, &run.passed, &instance.start)?);
        mtm_violations += run.mtm_violations;
    }
    let d1: Vec<f64> = filter
        .iter()
        .zip(&server)
        .map(|(f, s)| f - 2.0 * s)
        .collect();
    let d2: Vec<f64> = server
        .iter()
        .zip(&server_opt)
        .map(|(s, o)| s - (2.0 * k - 1.0) * o - additive)
        .collect();
    let d3: Vec<f64> = server_opt.iter().map(|o| o - 2.0 * opt_full).collect();
    let flags = ChainFlags {
        filter_vs_server: nonpositive_mean(&d1, trials),
        server_vs_server_opt: nonpositive_mean(&d2, trials),
        server_opt_vs_opt: nonpositive_mean(&d3, trials),
    };
    let ratios = if opt_full > 0.0 {
        filter.iter().map(|c| c / opt_full).collect()
    } else {
        Vec::new()
    };
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(ChainReport {
        trials,
        opt_full,
        mean_filter_cost: mean(&filter),
        mean_server_cost: mean(&server),
        mean_server_opt: mean(&server_opt),
        ratios,
        flags,
        mtm_violations,
    })
}

//! Well-sharpened requests: a sampling checker for the sharpness
//! condition, k-median replacements, request splitting, and the pipeline
//! that chases well-sharpened requests through the randomized k-median
//! filter over the work function algorithm.

use serde::{Deserialize, Serialize};

use crate::config::{best_server, Configuration};
use crate::error::{check_capacity, invalid, Error, Result};
use crate::kmedian::{is_move_to_minimum, Charging, MedianRequest, RandomizedFilter};
use crate::kserver::WorkFunctionAlgorithm;
use crate::metric::{FiniteMetric, Metric};
use crate::online::Chaser;
use crate::request::{Centered, CostFunction, Scaled};
use crate::seed::Stream;

/// Absolute slack on normalized-growth comparisons.
pub const SHARPNESS_TOL: f64 = 1e-9;
/// Largest number of equal pieces a request may be split into.
pub const MAX_SPLIT: f64 = 1e4;
const MAX_RECORDED_VIOLATIONS: usize = 64;

/// `(x, y, z)` with `alpha d(y,z) >= d(x,z)` but
/// `beta f(y)/d(y,z) < f(x)/d(x,z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation<P> {
    pub x: P,
    pub y: P,
    pub z: P,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessWitness<P> {
    pub alpha: f64,
    pub beta: f64,
    pub sampled: usize,
    /// Pairs dropped because a point coincided with the center.
    pub skipped: usize,
    pub violation_count: usize,
    /// The first few violating triples.
    pub violations: Vec<Violation<P>>,
}

impl<P> SharpnessWitness<P> {
    pub fn accepted(&self) -> bool {
        self.violation_count == 0
    }
}

/// Draws `budget` pairs `(x, y)` from `sample` and tests the sharpness
/// implication around `z` on each. `beta` is any positive real here.
pub fn check_well_sharpened<M, F>(
    metric: &M,
    f: &F,
    z: &M::Point,
    alpha: f64,
    beta: f64,
    budget: usize,
    rng: &mut Stream,
    mut sample: impl FnMut(&mut Stream) -> M::Point,
) -> Result<SharpnessWitness<M::Point>>
where
    M: Metric,
    F: CostFunction<M> + ?Sized,
{
    if !(alpha > 1.0) || !(beta > 0.0) {
        return invalid(format!(
            "sharpness parameters need alpha > 1 and beta > 0, got ({alpha}, {beta})"
        ));
    }
    let mut w = SharpnessWitness {
        alpha,
        beta,
        sampled: 0,
        skipped: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for _ in 0..budget {
        let x = sample(rng);
        let y = sample(rng);
        let (dx, dy) = (metric.dist(&x, z), metric.dist(&y, z));
        if dx == 0.0 || dy == 0.0 {
            w.skipped += 1;
            continue;
        }
        w.sampled += 1;
        if alpha * dy < dx {
            continue;
        }
        let lhs = beta * f.value(metric, &y) / dy;
        let rhs = f.value(metric, &x) / dx;
        if !(lhs >= rhs - SHARPNESS_TOL) && !(lhs.is_infinite() && rhs.is_infinite()) {
            w.violation_count += 1;
            if w.violations.len() < MAX_RECORDED_VIOLATIONS {
                w.violations.push(Violation { x, y, z: z.clone() });
            }
        }
    }
    Ok(w)
}

/// Smallest `beta` for which `scale * dist^gamma` is `(alpha, beta)`
/// well-sharpened: the ratio `f/dist = scale * dist^(gamma-1)` grows by at
/// most `alpha^(gamma-1)` when the distance grows by `alpha`.
pub fn power_distance_beta(gamma: f64, alpha: f64) -> f64 {
    alpha.powf(gamma - 1.0)
}

/// `c * dist(., z)` calibrated to agree with `f` at `anchor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replacement<P> {
    pub center: P,
    pub c: f64,
    pub anchor: P,
}

impl<M: Metric> CostFunction<M> for Replacement<M::Point> {
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

/// Result of testing the replacement's key implication at one point `y`:
/// `f~(y) >= f~(anchor)/alpha` implies `f(y) >= f~(y)/beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationCheck {
    pub premise: bool,
    pub conclusion: bool,
}

impl ImplicationCheck {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

impl<P: Clone> Replacement<P> {
    pub fn check_implication<M, F>(
        &self,
        metric: &M,
        f: &F,
        y: &P,
        alpha: f64,
        beta: f64,
    ) -> ImplicationCheck
    where
        M: Metric<Point = P>,
        F: CostFunction<M> + ?Sized,
    {
        let at_y = self.value(metric, y);
        let at_anchor = self.value(metric, &self.anchor);
        ImplicationCheck {
            premise: at_y >= at_anchor / alpha,
            conclusion: f.value(metric, y) >= at_y / beta - SHARPNESS_TOL,
        }
    }
}

pub fn kmedian_replacement<M, F>(
    metric: &M,
    f: &F,
    z: &M::Point,
    anchor: &M::Point,
) -> Result<Replacement<M::Point>>
where
    M: Metric,
    F: CostFunction<M> + ?Sized,
{
    let d = metric.dist(anchor, z);
    if d == 0.0 {
        return Err(Error::DegenerateAnchor);
    }
    Ok(Replacement {
        center: z.clone(),
        c: f.value(metric, anchor) / d,
        anchor: anchor.clone(),
    })
}

/// Number of equal pieces `f/M` needed so that every current server `x`
/// satisfies `(f/M)(x) <= dist(z, x)`.
pub fn split_factor<M, F>(
    metric: &M,
    f: &F,
    z: &M::Point,
    servers: &Configuration<M::Point>,
) -> Result<usize>
where
    M: Metric,
    F: CostFunction<M> + ?Sized,
{
    let mut worst: f64 = 1.0;
    for x in servers.positions() {
        let d = metric.dist(x, z);
        let v = f.value(metric, x);
        if d == 0.0 {
            if v > 0.0 {
                return invalid("a server sits at the center where the request is positive; splitting cannot bound it");
            }
            continue;
        }
        worst = worst.max((v / d).ceil());
    }
    check_capacity("request split factor", worst, MAX_SPLIT)?;
    Ok(worst as usize)
}

pub fn split_request<M, F>(
    metric: &M,
    f: &F,
    z: &M::Point,
    servers: &Configuration<M::Point>,
) -> Result<(usize, Scaled<F>)>
where
    M: Metric,
    F: CostFunction<M> + Clone,
{
    let pieces = split_factor(metric, f, z, servers)?;
    Ok((
        pieces,
        Scaled {
            inner: f.clone(),
            weight: 1.0 / pieces as f64,
        },
    ))
}

/// What one original request cost the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineStep {
    pub pre: Configuration<usize>,
    pub post: Configuration<usize>,
    pub pieces: usize,
    pub service: f64,
    pub movement: f64,
    /// Coefficients of the k-median requests handed to the filter.
    pub coefficients: Vec<f64>,
    pub implication_checks: usize,
    pub implication_failures: usize,
    pub mtm_violations: usize,
}

/// Chases well-sharpened requests on a finite metric: each request is split
/// so no current server is overcharged, then each piece is replaced by its
/// k-median cone anchored at the server nearest to the center and passed
/// through the randomized filter over the work function algorithm.
#[derive(Debug, Clone)]
pub struct WellSharpenedPipeline {
    filter: RandomizedFilter<WorkFunctionAlgorithm>,
    charging: Charging,
    certificate: Option<(f64, f64)>,
}

impl WellSharpenedPipeline {
    pub fn new(
        metric: &FiniteMetric,
        start: &Configuration<usize>,
        coins: Stream,
        charging: Charging,
    ) -> Result<Self> {
        Ok(Self {
            filter: RandomizedFilter::new(WorkFunctionAlgorithm::new(metric, start)?, coins),
            charging,
            certificate: None,
        })
    }

    /// Checks the replacement implication at every metric point on every
    /// anchored piece, using this `(alpha, beta)` certificate.
    pub fn with_certificate(mut self, alpha: f64, beta: f64) -> Self {
        self.certificate = Some((alpha, beta));
        self
    }

    pub fn configuration(&self) -> &Configuration<usize> {
        Chaser::<FiniteMetric, MedianRequest<usize>>::configuration(&self.filter)
    }

    pub fn respond<F>(&mut self, metric: &FiniteMetric, f: &F) -> Result<PipelineStep>
    where
        F: CostFunction<FiniteMetric> + Centered<usize> + Clone,
    {
        let z = *f.center();
        let pre = self.configuration().clone();
        let (pieces, piece) = split_request(metric, f, &z, &pre)?;
        let mut step = PipelineStep {
            pre: pre.clone(),
            post: pre,
            pieces,
            service: 0.0,
            movement: 0.0,
            coefficients: Vec::new(),
            implication_checks: 0,
            implication_failures: 0,
            mtm_violations: 0,
        };
        for _ in 0..pieces {
            let before = self.configuration().clone();
            let anchor = before.positions()[best_server(metric, &before, &Dist(z))];
            if anchor == z {
                // Minimum already occupied: nothing to pay, nothing to move.
                self.filter.skip();
                continue;
            }
            let replacement = kmedian_replacement(metric, &piece, &z, &anchor)?;
            if let Some((alpha, beta)) = self.certificate {
                for y in 0..metric.len() {
                    step.implication_checks += 1;
                    if !replacement
                        .check_implication(metric, &piece, &y, alpha, beta)
                        .holds()
                    {
                        step.implication_failures += 1;
                    }
                }
            }
            step.coefficients.push(replacement.c);
            if replacement.c == 0.0 {
                self.filter.skip();
                continue;
            }
            // The split keeps every coefficient at most 1 up to rounding.
            debug_assert!(
                replacement.c <= 1.0 + 1e-12,
                "coefficient {}",
                replacement.c
            );
            let request = MedianRequest::new(replacement.c.min(1.0), z)?;
            let record = self.filter.respond(metric, &request)?;
            let charged_at = match self.charging {
                Charging::Blind => &record.pre,
                Charging::Standard => &record.post,
            };
            step.service += crate::config::serve_cost(metric, charged_at, &piece);
            step.movement += record.movement;
            if !is_move_to_minimum(metric, &record.pre, &record.post, &z) {
                step.mtm_violations += 1;
            }
        }
        step.post = self.configuration().clone();
        Ok(step)
    }
}

/// Distance to a point, used to pick the server nearest to a center.
struct Dist(usize);

impl CostFunction<FiniteMetric> for Dist {
    fn value(&self, metric: &FiniteMetric, x: &usize) -> f64 {
        metric.dist(x, &self.0)
    }

    fn minimizer(&self, _: &FiniteMetric) -> Option<usize> {
        Some(self.0)
    }

    fn lipschitz_bound(&self) -> f64 {
        1.0
    }
}

use super::{ConfigSpace, KServer};
use crate::config::Configuration;
use crate::error::{invalid, Result};
use crate::metric::{FiniteMetric, Metric};

/// `w_t(C)`: the cheapest way to serve the first `t` requests and end in
/// configuration `C`, over every configuration of a [`ConfigSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct WorkFunction {
    values: Vec<f64>,
    t: usize,
}

impl WorkFunction {
    /// `w_0(C) = match(start, C)`.
    pub fn initial(
        space: &ConfigSpace,
        metric: &FiniteMetric,
        start: &Configuration<usize>,
    ) -> Self {
        let values = (0..space.len())
            .map(|i| metric.matching(start.positions(), space.labels(i)))
            .collect();
        Self { values, t: 0 }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `w_t(C) = min_{x in C} w_{t-1}(C - x + r) + d(x, r)`, which equals
    /// `min_{C' containing r} w_{t-1}(C') + match(C', C)`.
    pub fn advance(&self, space: &ConfigSpace, metric: &FiniteMetric, r: usize) -> Self {
        let values = (0..space.len())
            .map(|c| {
                space
                    .labels(c)
                    .iter()
                    .enumerate()
                    .map(|(slot, &x)| self.values[space.replaced(c, slot, r)] + metric.dist(&x, &r))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Self {
            values,
            t: self.t + 1,
        }
    }

    /// Largest `|w(C) - w(C')| - match(C, C')` over all pairs; `<= 0` when the
    /// work function is 1-Lipschitz.
    pub fn lipschitz_excess(&self, match_matrix: &[f64]) -> f64 {
        let n = self.values.len();
        let mut worst = f64::NEG_INFINITY;
        for a in 0..n {
            for b in 0..n {
                worst =
                    worst.max((self.values[a] - self.values[b]).abs() - match_matrix[a * n + b]);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WfaStep {
    pub post: Configuration<usize>,
    /// Label of the server that moved to the request, if any.
    pub moved_from: Option<usize>,
    pub movement: f64,
}

/// The work function algorithm on a finite metric.
///
/// On request `r` it moves the server `x` minimizing `w_t(X - x + r) + d(x, r)`
/// (one server per step); ties go to the server with the smallest label.
#[derive(Debug, Clone)]
pub struct WorkFunctionAlgorithm {
    space: ConfigSpace,
    work: WorkFunction,
    current: usize,
    config: Configuration<usize>,
}

impl WorkFunctionAlgorithm {
    pub fn new(metric: &FiniteMetric, start: &Configuration<usize>) -> Result<Self> {
        let space = ConfigSpace::new(metric.len(), start.k())?;
        let Some(current) = space.index_of(start) else {
            return invalid("start configuration is not in the metric");
        };
        let work = WorkFunction::initial(&space, metric, start);
        Ok(Self {
            space,
            work,
            current,
            config: start.clone(),
        })
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.space
    }

    pub fn work_function(&self) -> &WorkFunction {
        &self.work
    }

    pub fn current(&self) -> &Configuration<usize> {
        &self.config
    }

    pub fn step(&mut self, metric: &FiniteMetric, r: usize) -> Result<WfaStep> {
        metric.validate_point(&r)?;
        self.work = self.work.advance(&self.space, metric, r);
        if self.space.contains(self.current, r) {
            return Ok(WfaStep {
                post: self.config.clone(),
                moved_from: None,
                movement: 0.0,
            });
        }
        let labels = self.space.labels(self.current).to_vec();
        // Labels are sorted, so a strict comparison keeps the lowest server on ties.
        let mut best: Option<(f64, usize, usize)> = None;
        for (slot, &x) in labels.iter().enumerate() {
            let next = self.space.replaced(self.current, slot, r);
            let score = self.work.value(next) + metric.dist(&x, &r);
            if best.is_none_or(|(s, _, _)| score < s) {
                best = Some((score, next, x));
            }
        }
        let (_, next, from) = best.expect("k >= 1");
        let movement = metric.dist(&from, &r);
        self.current = next;
        self.config = self.space.configuration(next);
        Ok(WfaStep {
            post: self.config.clone(),
            moved_from: Some(from),
            movement,
        })
    }
}

impl KServer<FiniteMetric> for WorkFunctionAlgorithm {
    fn configuration(&self) -> &Configuration<usize> {
        &self.config
    }

    fn serve(&mut self, metric: &FiniteMetric, r: &usize) -> Result<f64> {
        Ok(self.step(metric, *r)?.movement)
    }
}

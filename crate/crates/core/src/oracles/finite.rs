use crate::config::Configuration;
use crate::error::{invalid, Result};
use crate::kserver::ConfigSpace;
use crate::metric::{FiniteMetric, Metric};
use crate::request::CostFunction;

/// Offline optimum for chasing `requests` on a finite metric from `start`:
/// every configuration of the metric is a candidate, so the value is exact.
///
/// Each layer relaxes single-server moves `k` times, which reaches every
/// matching (a matching is at most `k` single-server moves) and never
/// undercuts one (by the triangle inequality of matching costs).
pub fn chasing_opt_finite<R: CostFunction<FiniteMetric>>(
    metric: &FiniteMetric,
    requests: &[R],
    start: &Configuration<usize>,
) -> Result<f64> {
    let space = ConfigSpace::new(metric.len(), start.k())?;
    let Some(s) = space.index_of(start) else {
        return invalid("start configuration is not in the metric");
    };
    let n = metric.len();
    let k = start.k();
    let mut values = vec![f64::INFINITY; space.len()];
    values[s] = 0.0;
    for f in requests {
        for _ in 0..k {
            let prev = values.clone();
            for (c, v) in values.iter_mut().enumerate() {
                for (slot, &x) in space.labels(c).iter().enumerate() {
                    for y in 0..n {
                        let cand = prev[space.replaced(c, slot, y)] + metric.dist(&x, &y);
                        if cand < *v {
                            *v = cand;
                        }
                    }
                }
            }
        }
        let service: Vec<f64> = (0..n).map(|p| f.value(metric, &p)).collect();
        for (c, v) in values.iter_mut().enumerate() {
            *v += space
                .labels(c)
                .iter()
                .map(|&p| service[p])
                .fold(f64::INFINITY, f64::min);
        }
    }
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}

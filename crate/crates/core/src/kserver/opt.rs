use std::collections::HashMap;

use super::ConfigSpace;
use crate::config::Configuration;
use crate::error::{invalid, Result};
use crate::metric::{FiniteMetric, Metric};

/// Exact offline k-server optimum on a finite metric: a layered DP where
/// layer `t` holds the configurations containing request `t`.
pub fn kserver_opt(
    metric: &FiniteMetric,
    requests: &[usize],
    start: &Configuration<usize>,
) -> Result<f64> {
    let space = ConfigSpace::new(metric.len(), start.k())?;
    let Some(s) = space.index_of(start) else {
        return invalid("start configuration is not in the metric");
    };
    for r in requests {
        metric.validate_point(r)?;
    }
    let mut layer: Vec<(usize, f64)> = vec![(s, 0.0)];
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    for &r in requests {
        let next: Vec<(usize, f64)> = space
            .containing(r)
            .into_iter()
            .map(|c| {
                let best = layer
                    .iter()
                    .map(|&(p, v)| {
                        let key = (p.min(c), p.max(c));
                        v + *cache
                            .entry(key)
                            .or_insert_with(|| space.matching(metric, p, c))
                    })
                    .fold(f64::INFINITY, f64::min);
                (c, best)
            })
            .collect();
        layer = next;
    }
    Ok(layer.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min))
}

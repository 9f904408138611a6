use super::KServer;
use crate::config::{match_cost, Configuration};
use crate::error::Result;
use crate::metric::{Line, Metric};

/// Classical double coverage on the line. Outside the hull the nearest
/// extreme server jumps to `r`; inside, the two bracketing servers move
/// toward `r` at equal speed until one of them arrives.
pub fn double_coverage_line(x: &Configuration<f64>, r: f64) -> Configuration<f64> {
    let p = x.positions();
    let k = p.len();
    if p.contains(&r) {
        return x.clone();
    }
    let mut next = p.to_vec();
    if r < p[0] {
        next[0] = r;
    } else if r > p[k - 1] {
        next[k - 1] = r;
    } else {
        let i = p.iter().rposition(|&q| q < r).unwrap();
        let d = (r - p[i]).min(p[i + 1] - r);
        if r - p[i] <= p[i + 1] - r {
            next[i] = r;
            next[i + 1] = p[i + 1] - d;
        } else {
            next[i] = p[i] + d;
            next[i + 1] = r;
        }
    }
    Configuration::from_canonical(next)
}

#[derive(Debug, Clone)]
pub struct DoubleCoverage {
    current: Configuration<f64>,
}

impl DoubleCoverage {
    pub fn new(start: Configuration<f64>) -> Self {
        Self { current: start }
    }
}

impl KServer<Line> for DoubleCoverage {
    fn configuration(&self) -> &Configuration<f64> {
        &self.current
    }

    fn serve(&mut self, metric: &Line, r: &f64) -> Result<f64> {
        metric.validate_point(r)?;
        let next = double_coverage_line(&self.current, *r);
        let moved = match_cost(metric, &self.current, &next)?;
        self.current = next;
        Ok(moved)
    }
}

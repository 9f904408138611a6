use rand::Rng;

use crate::error::{invalid, Result};
use crate::seed::Stream;

/// Independent arms losing 1 with probability `1 - 1/k`, else 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliArms {
    pub arms: usize,
    pub k: usize,
}

impl BernoulliArms {
    pub fn new(arms: usize, k: usize) -> Result<Self> {
        if k == 0 || k > arms {
            return invalid(format!("need 1 <= k <= n, got n = {arms}, k = {k}"));
        }
        Ok(Self { arms, k })
    }

    pub fn loss_probability(&self) -> f64 {
        1.0 - 1.0 / self.k as f64
    }

    /// With `k = 1` every loss is zero and the instance says nothing.
    pub fn degenerate(&self) -> bool {
        self.k == 1
    }

    /// Expected per-round loss of any fixed `k`-subset.
    pub fn subset_expected_loss(&self) -> f64 {
        self.loss_probability().powi(self.k as i32)
    }

    pub fn draw(&self, rng: &mut Stream) -> Vec<f64> {
        let p = self.loss_probability();
        (0..self.arms)
            .map(|_| if rng.gen::<f64>() < p { 1.0 } else { 0.0 })
            .collect()
    }
}

use rand::Rng;

use super::{Player, TupleSpace};
use crate::error::{invalid, Result};
use crate::seed::Stream;

/// Exponential weights over every tuple with the fixed rate
/// `sqrt(8 ln N / T)`, losses mapped from `[lo, hi]` to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Hedge {
    space: TupleSpace,
    weights: Vec<f64>,
    eta: f64,
    lo: f64,
    width: f64,
    factors: Vec<f64>,
    scratch: Vec<f64>,
}

impl Hedge {
    pub fn new(space: TupleSpace, horizon: usize, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return invalid(format!(
                "loss range ({lo}, {hi}) must be finite and non-empty"
            ));
        }
        if horizon == 0 {
            return invalid("Hedge needs a positive horizon");
        }
        let n = space.len();
        let eta = (8.0 * (n as f64).ln() / horizon as f64).sqrt();
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
            eta,
            lo,
            width: hi - lo,
            factors: vec![0.0; space.candidates()],
            scratch: vec![0.0; n],
            space,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Current sampling distribution (sums to one).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Regret guarantee in loss units: `width * sqrt(T ln N / 2)`.
    pub fn regret_bound(&self, horizon: usize) -> f64 {
        self.width * (horizon as f64 * (self.space.len() as f64).ln() / 2.0).sqrt()
    }
}

impl Player for Hedge {
    fn space(&self) -> &TupleSpace {
        &self.space
    }

    fn choose(&mut self, rng: &mut Stream) -> usize {
        let mut u: f64 = rng.gen::<f64>();
        for (i, w) in self.weights.iter().enumerate() {
            if u < *w {
                return i;
            }
            u -= w;
        }
        // Rounding left a sliver of mass: fall back to the last positive weight.
        self.weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
    }

    fn observe(&mut self, losses: &[f64]) {
        // exp(-eta * min_j l_j) = max_j exp(-eta * l_j)
        for (f, l) in self.factors.iter_mut().zip(losses) {
            let scaled = ((l - self.lo) / self.width).clamp(0.0, 1.0);
            *f = (-self.eta * scaled).exp();
        }
        self.space.tuple_max(&self.factors, &mut self.scratch);
        let mut total = 0.0;
        for (w, f) in self.weights.iter_mut().zip(&self.scratch) {
            *w *= f;
            total += *w;
        }
        for w in self.weights.iter_mut() {
            *w /= total;
        }
    }
}

use rand::Rng;

use super::{CandidateSet, TupleSpace};
use crate::error::{invalid, Result};
use crate::metric::dot;
use crate::seed::Stream;

/// Monte Carlo estimate of
/// `E_eps sup_tuples (1/t) sum_s eps_s min_j f_s . x_j`
/// over `draws` sign vectors.
pub fn rademacher_estimate(
    losses: &[Vec<f64>],
    k: usize,
    candidates: &CandidateSet,
    draws: usize,
    rng: &mut Stream,
) -> Result<f64> {
    if losses.is_empty() || draws == 0 {
        return invalid("Rademacher estimate needs at least one loss and one draw");
    }
    let space = TupleSpace::new(candidates.len(), k)?;
    let t = losses.len();
    // Per round, each tuple's min-of-k linear value.
    let mut table = vec![0.0; t * space.len()];
    let mut values = vec![0.0; candidates.len()];
    for (s, f) in losses.iter().enumerate() {
        for (v, p) in values.iter_mut().zip(&candidates.points) {
            *v = dot(f, p);
        }
        space.tuple_losses(&values, &mut table[s * space.len()..(s + 1) * space.len()]);
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; space.len()];
    for _ in 0..draws {
        sums.iter_mut().for_each(|x| *x = 0.0);
        for s in 0..t {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            for (acc, v) in sums
                .iter_mut()
                .zip(&table[s * space.len()..(s + 1) * space.len()])
            {
                *acc += sign * v;
            }
        }
        total += sums.iter().copied().fold(f64::NEG_INFINITY, f64::max) / t as f64;
    }
    Ok(total / draws as f64)
}

//! Top-k action online learning: Hedge and follow-the-leader over k-subsets
//! of a finite candidate set, regret curves against the exact static
//! optimum, and empirical Rademacher complexity.
//!
//! Every learner sees a round as the vector of losses of the individual
//! candidates; a tuple's loss is the smallest loss among its members.

mod ftl;
mod grid;
mod hedge;
mod rademacher;
mod tuples;

pub use ftl::FollowTheLeader;
pub use grid::{ball_grid, line_grid, CandidateSet};
pub use hedge::Hedge;
pub use rademacher::rademacher_estimate;
pub use tuples::{TupleSpace, MAX_TUPLES};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::seed::Stream;

/// Per-step and cumulative loss against the static optimum of the prefix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub loss: Vec<f64>,
    pub cum_loss: Vec<f64>,
    /// Best fixed tuple's cumulative loss over the first `t` rounds.
    pub opt: Vec<f64>,
    pub regret: Vec<f64>,
}

impl RegretCurve {
    pub fn len(&self) -> usize {
        self.loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loss.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }

    pub fn push(&mut self, loss: f64, opt: f64) {
        let cum = self.cum_loss.last().copied().unwrap_or(0.0) + loss;
        self.loss.push(loss);
        self.cum_loss.push(cum);
        self.opt.push(opt);
        self.regret.push(cum - opt);
    }

    /// Columns `t,loss,cum_loss,opt,regret`, `t` starting at 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,loss,cum_loss,opt,regret\n");
        for t in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t + 1,
                self.loss[t],
                self.cum_loss[t],
                self.opt[t],
                self.regret[t]
            ));
        }
        out
    }
}

/// An online learner choosing one tuple of a [`TupleSpace`] per round.
pub trait Player {
    fn space(&self) -> &TupleSpace;

    fn choose(&mut self, rng: &mut Stream) -> usize;

    fn observe(&mut self, losses: &[f64]);
}

/// Produces each round's candidate losses, possibly reacting to the
/// members of the tuple just played.
pub trait Environment {
    fn losses(&mut self, t: usize, played: &[usize]) -> Vec<f64>;
}

/// An environment that ignores the player.
pub struct Oblivious<F>(pub F);

impl<F: FnMut(usize) -> Vec<f64>> Environment for Oblivious<F> {
    fn losses(&mut self, t: usize, _: &[usize]) -> Vec<f64> {
        (self.0)(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Played {
    pub curve: RegretCurve,
    pub actions: Vec<usize>,
    /// Static optimum over all rounds and the (lexicographically first) tuple
    /// attaining it.
    pub opt_value: f64,
    pub opt_tuple: usize,
}

/// Runs `player` against `env` for `horizon` rounds.
pub fn play<P, E>(player: &mut P, env: &mut E, horizon: usize, rng: &mut Stream) -> Result<Played>
where
    P: Player + ?Sized,
    E: Environment + ?Sized,
{
    let n = player.space().len();
    let mut cumulative = vec![0.0; n];
    let mut curve = RegretCurve::default();
    let mut actions = Vec::with_capacity(horizon);
    let mut scratch = vec![0.0; n];
    for t in 0..horizon {
        let a = player.choose(rng);
        let members = player.space().members(a).to_vec();
        let losses = env.losses(t, &members);
        if losses.len() != player.space().candidates() {
            return invalid(format!(
                "environment produced {} losses for {} candidates",
                losses.len(),
                player.space().candidates()
            ));
        }
        player.space().tuple_losses(&losses, &mut scratch);
        for (c, l) in cumulative.iter_mut().zip(&scratch) {
            *c += l;
        }
        curve.push(
            scratch[a],
            cumulative.iter().copied().fold(f64::INFINITY, f64::min),
        );
        actions.push(a);
        player.observe(&losses);
    }
    let (opt_tuple, opt_value) = argmin(&cumulative);
    Ok(Played {
        curve,
        actions,
        opt_value,
        opt_tuple,
    })
}

/// First index of the minimum.
pub(crate) fn argmin(xs: &[f64]) -> (usize, f64) {
    xs.iter().copied().enumerate().fold(
        (0, f64::INFINITY),
        |best, (i, v)| if v < best.1 { (i, v) } else { best },
    )
}

/// Exact best fixed tuple for a full loss sequence.
pub fn static_opt_topk(space: &TupleSpace, rounds: &[Vec<f64>]) -> Result<(f64, usize)> {
    let mut cumulative = vec![0.0; space.len()];
    let mut scratch = vec![0.0; space.len()];
    for losses in rounds {
        if losses.len() != space.candidates() {
            return invalid("loss vector length does not match the candidate count");
        }
        space.tuple_losses(losses, &mut scratch);
        for (c, l) in cumulative.iter_mut().zip(&scratch) {
            *c += l;
        }
    }
    let (i, v) = argmin(&cumulative);
    Ok((if rounds.is_empty() { 0.0 } else { v }, i))
}

/// Default lattice spacing for a horizon: `1 / ceil(sqrt(T))`.
pub fn default_spacing(horizon: usize) -> f64 {
    1.0 / (horizon.max(1) as f64).sqrt().ceil()
}

/// Hedge over the `k`-subsets of `candidates`, losses declared to lie in
/// `range`.
pub fn hedge_topk<E: Environment + ?Sized>(
    candidates: &CandidateSet,
    k: usize,
    horizon: usize,
    range: (f64, f64),
    env: &mut E,
    rng: &mut Stream,
) -> Result<Played> {
    let mut hedge = Hedge::new(TupleSpace::new(candidates.len(), k)?, horizon, range)?;
    play(&mut hedge, env, horizon, rng)
}

/// Follow-the-leader over the `k`-subsets of `candidates`.
pub fn ftl_topk<E: Environment + ?Sized>(
    candidates: &CandidateSet,
    k: usize,
    horizon: usize,
    env: &mut E,
) -> Result<Played> {
    let mut ftl = FollowTheLeader::new(TupleSpace::new(candidates.len(), k)?);
    // The leader never draws, so any stream will do.
    let mut unused = crate::seed::SeedTree::new(0).stream();
    play(&mut ftl, env, horizon, &mut unused)
}

/// Best-of-`k` experts: Hedge over every `k`-subset of `arms` arms with
/// losses in `[0, 1]`.
pub fn hedge_subsets<E: Environment + ?Sized>(
    arms: usize,
    k: usize,
    horizon: usize,
    env: &mut E,
    rng: &mut Stream,
) -> Result<Played> {
    let mut hedge = Hedge::new(TupleSpace::new(arms, k)?, horizon, (0.0, 1.0))?;
    play(&mut hedge, env, horizon, rng)
}

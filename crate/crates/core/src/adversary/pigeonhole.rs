use serde::{Deserialize, Serialize};

use crate::regret::{CandidateSet, Environment};

const CASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PigeonholeCase {
    /// Every action sits at least `1/(2k)` above zero.
    FarFromZero,
    /// Two neighbouring actions are at least `1/k` apart.
    WideGap,
    /// Every action sits at least `1/(2k)` below one.
    FarFromOne,
}

/// The loss `x -> f(|x - center|)` chosen against a sorted action tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PigeonholeRequest {
    pub center: f64,
    pub case: PigeonholeCase,
}

/// Picks a loss centre at distance at least `1/(2k)` from every action in
/// `[0, 1]`. Panics only if the pigeonhole argument fails, which cannot
/// happen for sorted inputs in `[0, 1]`.
pub fn deterministic_regret_adversary(k: usize, actions: &[f64]) -> PigeonholeRequest {
    assert!(k >= 1 && actions.len() == k, "expected {k} actions");
    let half = 1.0 / (2.0 * k as f64);
    if actions[0] >= half - CASE_TOL {
        return PigeonholeRequest {
            center: 0.0,
            case: PigeonholeCase::FarFromZero,
        };
    }
    let widest = actions
        .windows(2)
        .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
        .filter(|(gap, _)| *gap >= 2.0 * half - CASE_TOL)
        .fold(None, |best: Option<(f64, f64)>, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        });
    if let Some((_, mid)) = widest {
        return PigeonholeRequest {
            center: mid,
            case: PigeonholeCase::WideGap,
        };
    }
    assert!(
        actions[k - 1] <= 1.0 - half + CASE_TOL,
        "no pigeonhole case applies to {actions:?}"
    );
    PigeonholeRequest {
        center: 1.0,
        case: PigeonholeCase::FarFromOne,
    }
}

/// Adaptive environment over one-dimensional candidates in `[0, 1]`:
/// reacts to each played tuple with `x -> profile(|x - center|)`.
pub struct PigeonholeEnvironment<F> {
    pub k: usize,
    pub candidates: CandidateSet,
    pub profile: F,
    pub requests: Vec<PigeonholeRequest>,
}

impl<F: Fn(f64) -> f64> PigeonholeEnvironment<F> {
    pub fn new(k: usize, candidates: CandidateSet, profile: F) -> Self {
        Self {
            k,
            candidates,
            profile,
            requests: Vec::new(),
        }
    }
}

impl<F: Fn(f64) -> f64> Environment for PigeonholeEnvironment<F> {
    fn losses(&mut self, _: usize, played: &[usize]) -> Vec<f64> {
        let mut actions: Vec<f64> = played
            .iter()
            .map(|&i| self.candidates.points[i][0])
            .collect();
        actions.sort_by(f64::total_cmp);
        let request = deterministic_regret_adversary(self.k, &actions);
        self.requests.push(request);
        self.candidates
            .losses(|x| (self.profile)((x[0] - request.center).abs()))
    }
}

use super::{argmin, Player, TupleSpace};
use crate::seed::Stream;

/// Plays the tuple with the smallest cumulative loss so far; ties go to the
/// lexicographically first tuple. Uses no randomness.
#[derive(Debug, Clone)]
pub struct FollowTheLeader {
    space: TupleSpace,
    cumulative: Vec<f64>,
    scratch: Vec<f64>,
}

impl FollowTheLeader {
    pub fn new(space: TupleSpace) -> Self {
        let n = space.len();
        Self {
            space,
            cumulative: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    pub fn leader(&self) -> usize {
        argmin(&self.cumulative).0
    }
}

impl Player for FollowTheLeader {
    fn space(&self) -> &TupleSpace {
        &self.space
    }

    fn choose(&mut self, _: &mut Stream) -> usize {
        self.leader()
    }

    fn observe(&mut self, losses: &[f64]) {
        self.space.tuple_losses(losses, &mut self.scratch);
        for (c, l) in self.cumulative.iter_mut().zip(&self.scratch) {
            *c += l;
        }
    }
}

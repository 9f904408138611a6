use crate::error::{check_capacity, invalid, Result};

/// Largest number of tuples a learner will enumerate.
pub const MAX_TUPLES: f64 = 1e7;

/// All `k`-subsets of `0..candidates` in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleSpace {
    candidates: usize,
    k: usize,
    members: Vec<u32>,
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl TupleSpace {
    pub fn new(candidates: usize, k: usize) -> Result<Self> {
        if k == 0 || candidates < k {
            return invalid(format!(
                "need 1 <= k <= candidates, got k = {k} with {candidates} candidates"
            ));
        }
        check_capacity("action tuples", binomial(candidates, k).round(), MAX_TUPLES)?;
        let mut members = Vec::new();
        let mut cur: Vec<u32> = (0..k as u32).collect();
        loop {
            members.extend_from_slice(&cur);
            // Advance to the next combination in lexicographic order.
            let Some(i) = (0..k)
                .rev()
                .find(|&i| (cur[i] as usize) < candidates - k + i)
            else {
                break;
            };
            cur[i] += 1;
            for j in i + 1..k {
                cur[j] = cur[j - 1] + 1;
            }
        }
        Ok(Self {
            candidates,
            k,
            members,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn members(&self, tuple: usize) -> Vec<usize> {
        self.members[tuple * self.k..(tuple + 1) * self.k]
            .iter()
            .map(|&m| m as usize)
            .collect()
    }

    pub fn index_of(&self, members: &[usize]) -> Option<usize> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        (0..self.len()).find(|&t| self.members(t) == sorted)
    }

    /// `out[a] = min over members of losses[member]` for every tuple.
    pub fn tuple_losses(&self, losses: &[f64], out: &mut [f64]) {
        for (o, tuple) in out.iter_mut().zip(self.members.chunks_exact(self.k)) {
            *o = tuple
                .iter()
                .map(|&m| losses[m as usize])
                .fold(f64::INFINITY, f64::min);
        }
    }

    /// Same as [`Self::tuple_losses`] but taking the maximum, used for
    /// multiplicative factors `exp(-eta * loss)`.
    pub(crate) fn tuple_max(&self, values: &[f64], out: &mut [f64]) {
        for (o, tuple) in out.iter_mut().zip(self.members.chunks_exact(self.k)) {
            *o = tuple
                .iter()
                .map(|&m| values[m as usize])
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
}

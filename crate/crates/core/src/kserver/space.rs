use std::collections::HashMap;

use crate::config::Configuration;
use crate::error::{check_capacity, invalid, Result};
use crate::metric::{FiniteMetric, Metric};

/// Largest configuration space the finite-metric engines will enumerate.
pub const MAX_CONFIGURATIONS: f64 = 1e6;

/// All k-element multisets of the points `0..n`, in lexicographic order,
/// with `O(1)` single-server replacement lookups.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    n: usize,
    k: usize,
    configs: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    // replace[(c * k + slot) * n + r] = index of c with c[slot] := r
    replace: Vec<u32>,
}

fn multiset_count(n: usize, k: usize) -> f64 {
    // C(n + k - 1, k)
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n + i) as f64 / (i + 1) as f64;
    }
    c
}

fn push_multisets(
    n: usize,
    k: usize,
    from: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in from..n {
        cur.push(v);
        push_multisets(n, k, v, cur, out);
        cur.pop();
    }
}

impl ConfigSpace {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return invalid("configuration space needs n >= 1 and k >= 1");
        }
        check_capacity(
            "k-server configurations",
            multiset_count(n, k).round(),
            MAX_CONFIGURATIONS,
        )?;
        let mut configs = Vec::new();
        push_multisets(n, k, 0, &mut Vec::with_capacity(k), &mut configs);
        let index: HashMap<Vec<usize>, usize> = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let mut replace = vec![0u32; configs.len() * k * n];
        for (ci, c) in configs.iter().enumerate() {
            for slot in 0..k {
                for r in 0..n {
                    let mut d = c.clone();
                    d[slot] = r;
                    d.sort_unstable();
                    replace[(ci * k + slot) * n + r] = index[&d] as u32;
                }
            }
        }
        Ok(Self {
            n,
            k,
            configs,
            index,
            replace,
        })
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self, idx: usize) -> &[usize] {
        &self.configs[idx]
    }

    pub fn index_of(&self, c: &Configuration<usize>) -> Option<usize> {
        self.index.get(c.positions()).copied()
    }

    pub fn configuration(&self, idx: usize) -> Configuration<usize> {
        Configuration::from_canonical(self.configs[idx].clone())
    }

    pub fn replaced(&self, idx: usize, slot: usize, r: usize) -> usize {
        self.replace[(idx * self.k + slot) * self.n + r] as usize
    }

    pub fn contains(&self, idx: usize, r: usize) -> bool {
        self.configs[idx].contains(&r)
    }

    /// Indices of the configurations that contain `r`.
    pub fn containing(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.contains(i, r)).collect()
    }

    pub fn matching(&self, metric: &FiniteMetric, a: usize, b: usize) -> f64 {
        metric.matching(&self.configs[a], &self.configs[b])
    }

    /// Dense `len x len` table of matching costs.
    pub fn match_matrix(&self, metric: &FiniteMetric) -> Result<Vec<f64>> {
        let n = self.len();
        check_capacity("configuration matching table", (n * n) as f64, 2.5e7)?;
        let mut out = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let d = self.matching(metric, a, b);
                out[a * n + b] = d;
                out[b * n + a] = d;
            }
        }
        Ok(out)
    }
}

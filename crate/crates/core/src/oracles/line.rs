use serde::Serialize;

use crate::config::Configuration;
use crate::error::{check_capacity, invalid, Result};
use crate::ledger::Trajectory;
use crate::metric::Line;
use crate::request::{CostFunction, LineRequest};

/// Largest product grid (`grid_len^k`) the line DP will sweep.
pub const MAX_GRID_CELLS: f64 = 1e6;
const MAX_BACK_POINTERS: f64 = 1e8;

/// Optimal value and one optimal trajectory on a candidate grid.
#[derive(Debug, Clone)]
pub struct LineOpt {
    pub value: f64,
    pub trajectory: Trajectory<f64>,
}

/// Regular lattice on `[lo, hi]` with spacing `h`, merged with every
/// request knot and minimizer and the start positions.
pub fn candidate_grid(
    requests: &[LineRequest],
    start: &Configuration<f64>,
    lo: f64,
    hi: f64,
    h: f64,
) -> Result<Vec<f64>> {
    if !(h > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return invalid("grid needs finite lo <= hi and h > 0");
    }
    let steps = ((hi - lo) / h).round() as usize;
    check_capacity("grid lattice points", steps as f64 + 1.0, MAX_GRID_CELLS)?;
    let mut grid: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * h).collect();
    for f in requests {
        grid.extend(f.knots());
        grid.extend(f.minimizer(&Line));
    }
    grid.extend_from_slice(start.positions());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

/// Start positions plus every request knot and minimizer. For piecewise
/// linear and cone requests the optimum lives on these points.
pub fn breakpoint_grid(requests: &[LineRequest], start: &Configuration<f64>) -> Vec<f64> {
    let mut grid: Vec<f64> = start.positions().to_vec();
    for f in requests {
        grid.extend(f.knots());
        grid.extend(f.minimizer(&Line));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Product grid `G^k` with tuples addressed as mixed-radix integers.
struct Lattice<'a> {
    grid: &'a [f64],
    k: usize,
    cells: usize,
    binom: Vec<Vec<usize>>,
}

impl<'a> Lattice<'a> {
    fn new(grid: &'a [f64], k: usize) -> Result<Self> {
        if grid.is_empty()
            || grid.windows(2).any(|w| !(w[0] < w[1]))
            || grid.iter().any(|g| !g.is_finite())
        {
            return invalid("grid must be finite and strictly increasing");
        }
        let g = grid.len();
        check_capacity(
            "line DP grid cells",
            (g as f64).powi(k as i32),
            MAX_GRID_CELLS,
        )?;
        let top = g + k;
        let mut binom = vec![vec![0usize; k + 2]; top + 1];
        for row in binom.iter_mut() {
            row[0] = 1;
        }
        for n in 1..=top {
            for r in 1..=k + 1 {
                binom[n][r] = binom[n - 1][r - 1] + binom[n - 1][r];
            }
        }
        Ok(Self {
            grid,
            k,
            cells: g.pow(k as u32),
            binom,
        })
    }

    fn decode(&self, mut cell: usize, out: &mut [usize]) {
        let g = self.grid.len();
        for c in out.iter_mut() {
            *c = cell % g;
            cell /= g;
        }
    }

    fn encode(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.grid.len() + c)
    }

    fn multisets(&self) -> usize {
        self.binom[self.grid.len() + self.k - 1][self.k]
    }

    /// Rank of a non-decreasing tuple among all multisets (combinatorial
    /// number system on `c_j + j`).
    fn rank(&self, sorted: &[usize]) -> usize {
        sorted
            .iter()
            .enumerate()
            .map(|(j, &c)| self.binom[c + j][j + 1])
            .sum()
    }

    fn index_of(&self, x: f64) -> Option<usize> {
        self.grid.binary_search_by(|g| g.total_cmp(&x)).ok()
    }

    /// In-place L1 distance transform: `val(C) <- min_C' val(C') + |C - C'|_1`,
    /// carrying the source cell along.
    fn transform(&self, val: &mut [f64], src: &mut [u32]) {
        let g = self.grid.len();
        let mut stride = 1;
        for _ in 0..self.k {
            let block = stride * g;
            for outer in (0..self.cells).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for i in 1..g {
                        let (p, c) = (base + (i - 1) * stride, base + i * stride);
                        let cand = val[p] + (self.grid[i] - self.grid[i - 1]);
                        if cand < val[c] {
                            val[c] = cand;
                            src[c] = src[p];
                        }
                    }
                    for i in (0..g - 1).rev() {
                        let (p, c) = (base + (i + 1) * stride, base + i * stride);
                        let cand = val[p] + (self.grid[i + 1] - self.grid[i]);
                        if cand < val[c] {
                            val[c] = cand;
                            src[c] = src[p];
                        }
                    }
                }
            }
            stride = block;
        }
    }

    fn service(&self, f: &LineRequest) -> Vec<f64> {
        let per_point: Vec<f64> = self.grid.iter().map(|x| f.value(&Line, x)).collect();
        let mut coords = vec![0; self.k];
        (0..self.cells)
            .map(|cell| {
                self.decode(cell, &mut coords);
                coords
                    .iter()
                    .map(|&c| per_point[c])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Zero at every ordering of `start`, `+inf` elsewhere.
    fn start_values(&self, start: &Configuration<f64>) -> Result<Vec<f64>> {
        let mut idx = Vec::with_capacity(self.k);
        for &x in start.positions() {
            match self.index_of(x) {
                Some(i) => idx.push(i),
                None => return invalid(format!("start position {x} is not on the grid")),
            }
        }
        let mut val = vec![f64::INFINITY; self.cells];
        let mut coords = vec![0; self.k];
        for cell in 0..self.cells {
            self.decode(cell, &mut coords);
            coords.sort_unstable();
            if coords == idx {
                val[cell] = 0.0;
            }
        }
        Ok(val)
    }
}

fn check_start(start: &Configuration<f64>) -> Result<()> {
    if start.positions().iter().any(|x| !x.is_finite()) {
        return invalid("start positions must be finite");
    }
    Ok(())
}

/// Exact optimum over trajectories confined to `grid`:
/// `V_t(C) = min_C' V_{t-1}(C') + match(C', C) + serve(C, f_t)`.
///
/// The grid must contain the start positions. Values live on the full
/// product grid, where the L1 distance between tuples, minimized over
/// orderings, is the matching cost on the line.
pub fn chasing_opt_line(
    requests: &[LineRequest],
    start: &Configuration<f64>,
    grid: &[f64],
) -> Result<LineOpt> {
    check_start(start)?;
    let lat = Lattice::new(grid, start.k())?;
    let m = lat.multisets();
    check_capacity(
        "line DP back-pointers",
        (m * requests.len()) as f64,
        MAX_BACK_POINTERS,
    )?;
    let k = lat.k;
    let mut val = lat.start_values(start)?;
    let mut src = vec![0u32; lat.cells];
    let mut back: Vec<Vec<u32>> = Vec::with_capacity(requests.len());
    let mut coords = vec![0; k];
    for f in requests {
        for (i, s) in src.iter_mut().enumerate() {
            *s = i as u32;
        }
        lat.transform(&mut val, &mut src);
        let mut layer = vec![0u32; m];
        for cell in 0..lat.cells {
            lat.decode(cell, &mut coords);
            if coords.windows(2).all(|w| w[0] <= w[1]) {
                let mut from = vec![0; k];
                lat.decode(src[cell] as usize, &mut from);
                from.sort_unstable();
                layer[lat.rank(&coords)] = lat.encode(&from) as u32;
            }
        }
        back.push(layer);
        for (v, s) in val.iter_mut().zip(lat.service(f)) {
            *v += s;
        }
    }

    let (best_cell, value) =
        val.iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
    if !value.is_finite() {
        return Ok(LineOpt {
            value,
            trajectory: Trajectory::default(),
        });
    }

    // Walk back-pointers from the best final configuration.
    let mut path: Vec<Vec<usize>> = Vec::with_capacity(requests.len());
    let mut cur = vec![0; k];
    lat.decode(best_cell, &mut cur);
    cur.sort_unstable();
    for layer in back.iter().rev() {
        path.push(cur.clone());
        let prev = layer[lat.rank(&cur)] as usize;
        lat.decode(prev, &mut cur);
    }
    path.reverse();

    let mut trajectory = Trajectory::default();
    let mut pre: Vec<f64> = start.positions().to_vec();
    for (f, idx) in requests.iter().zip(&path) {
        let post: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
        let movement: f64 = pre.iter().zip(&post).map(|(a, b)| (a - b).abs()).sum();
        let service = post
            .iter()
            .map(|x| f.value(&Line, x))
            .fold(f64::INFINITY, f64::min);
        trajectory.push(&pre, &post, service, movement);
        pre = post;
    }
    Ok(LineOpt { value, trajectory })
}

/// Optimum when each request is charged at the configuration held before
/// moving. One repositioning from `start` is allowed before the first
/// charge; with it the optimal value equals the standard one, since the
/// blind schedule can occupy each standard configuration one step early.
pub fn blind_opt(
    requests: &[LineRequest],
    start: &Configuration<f64>,
    grid: &[f64],
) -> Result<f64> {
    check_start(start)?;
    let lat = Lattice::new(grid, start.k())?;
    let mut val = lat.start_values(start)?;
    let mut src = vec![0u32; lat.cells];
    lat.transform(&mut val, &mut src);
    for f in requests {
        for (v, s) in val.iter_mut().zip(lat.service(f)) {
            *v += s;
        }
        lat.transform(&mut val, &mut src);
    }
    Ok(val.iter().copied().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineLevel {
    pub h: f64,
    pub grid_len: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineReport {
    pub levels: Vec<RefineLevel>,
    /// Every finer level is at most the coarser one, within 1e-9.
    pub monotone: bool,
    /// Successive differences shrink once they become non-zero.
    pub stabilizing: bool,
    pub value: f64,
    /// Gap between the last two levels, reported as the error bar.
    pub error_bar: f64,
}

/// Solves the same instance on a sequence of decreasing resolutions.
/// Nested lattices (each `h` dividing the previous) make the values
/// non-increasing.
pub fn chasing_opt_refine(
    requests: &[LineRequest],
    start: &Configuration<f64>,
    lo: f64,
    hi: f64,
    resolutions: &[f64],
) -> Result<RefineReport> {
    if resolutions.is_empty() || resolutions.windows(2).any(|w| !(w[1] < w[0])) {
        return invalid("resolutions must be non-empty and strictly decreasing");
    }
    let mut levels = Vec::with_capacity(resolutions.len());
    for &h in resolutions {
        let grid = candidate_grid(requests, start, lo, hi, h)?;
        let value = opt_value(requests, start, &grid)?;
        levels.push(RefineLevel {
            h,
            grid_len: grid.len(),
            value,
        });
    }
    let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    // Coarse levels can tie exactly (request centers are always on the grid);
    // once the values start to move, the steps must shrink.
    let moving: Vec<f64> = diffs.iter().copied().skip_while(|d| *d <= 1e-12).collect();
    let stabilizing = moving.windows(2).all(|d| d[1] <= d[0] + 1e-9);
    let value = *values.last().unwrap();
    let error_bar = diffs.last().copied().unwrap_or(0.0);
    Ok(RefineReport {
        levels,
        monotone,
        stabilizing,
        value,
        error_bar,
    })
}

/// Value-only standard DP (no back-pointers).
fn opt_value(requests: &[LineRequest], start: &Configuration<f64>, grid: &[f64]) -> Result<f64> {
    let lat = Lattice::new(grid, start.k())?;
    let mut val = lat.start_values(start)?;
    let mut src = vec![0u32; lat.cells];
    for f in requests {
        lat.transform(&mut val, &mut src);
        for (v, s) in val.iter_mut().zip(lat.service(f)) {
            *v += s;
        }
    }
    Ok(val.iter().copied().fold(f64::INFINITY, f64::min))
}

use rand::Rng;

use crate::error::{invalid, Result};
use crate::metric::{dot, l2_norm};
use crate::seed::Stream;

/// Linear losses `±w_i`, row and sign uniform, for a matrix rescaled so its
/// largest row has unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOlo {
    rows: Vec<Vec<f64>>,
    /// Factor the input was divided by.
    pub scale: f64,
}

/// Loss of the action pair `(x, -x)` against the linear loss `w`.
pub fn pair_loss(x: &[f64], w: &[f64]) -> f64 {
    -dot(x, w).abs()
}

impl MatrixOlo {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return invalid("matrix instance needs a square matrix");
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        let scale = rows.iter().map(|r| l2_norm(r)).fold(0.0, f64::max);
        if scale == 0.0 {
            return invalid("the zero matrix cannot be normalized");
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x / scale).collect())
            .collect();
        Ok(Self { rows, scale })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn draw(&self, rng: &mut Stream) -> Vec<f64> {
        let row = &self.rows[rng.gen_range(0..self.dim())];
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        row.iter().map(|x| sign * x).collect()
    }

    /// `-|Wx|_1 / d`, the expected pair loss at `x`.
    pub fn expected_pair_loss(&self, x: &[f64]) -> f64 {
        -self.rows.iter().map(|r| dot(r, x).abs()).sum::<f64>() / self.dim() as f64
    }
}

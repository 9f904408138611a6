//! k-server engines used as backends by the k-median reductions: the work
//! function algorithm on finite metrics, double coverage on the line, and
//! the exact offline optimum.

mod dc;
mod opt;
mod space;
mod wfa;

pub use dc::{double_coverage_line, DoubleCoverage};
pub use opt::kserver_opt;
pub use space::{ConfigSpace, MAX_CONFIGURATIONS};
pub use wfa::{WfaStep, WorkFunction, WorkFunctionAlgorithm};

use crate::config::Configuration;
use crate::error::Result;
use crate::metric::Metric;

/// An online k-server algorithm: every request point must end up covered.
pub trait KServer<M: Metric> {
    fn configuration(&self) -> &Configuration<M::Point>;

    /// Serves `r` and returns the distance travelled.
    fn serve(&mut self, metric: &M, r: &M::Point) -> Result<f64>;
}

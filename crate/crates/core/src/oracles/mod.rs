//! Exact offline optima used as comparators: dynamic programs over
//! candidate grids on the line and over configuration spaces of finite
//! metrics.

mod finite;
mod line;

pub use finite::chasing_opt_finite;
pub use line::{
    blind_opt, breakpoint_grid, candidate_grid, chasing_opt_line, chasing_opt_refine, LineOpt,
    RefineLevel, RefineReport, MAX_GRID_CELLS,
};

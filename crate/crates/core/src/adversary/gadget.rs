use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::request::PlanarBody;

pub type Point2 = [f64; 2];

const INSIDE_TOL: f64 = 1e-9;

/// Quadrilateral with corners `(a,0), (b,0), (c,1), (d,1)`.
fn quad(a: f64, b: f64, c: f64, d: f64) -> PlanarBody {
    PlanarBody::new(&[[a, 0.0], [b, 0.0], [c, 1.0], [d, 1.0]]).expect("finite corners")
}

/// Four sets whose two-server solutions are exactly "both servers above
/// `[a1, a2]`" or "both above `[b1, b2]`", one server on each edge of the
/// unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarGadget {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl PlanarGadget {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<Self> {
        if !(0.0 <= a1 && a1 < a2 && a2 < b1 && b1 < b2 && b2 <= 1.0) {
            return invalid(format!(
                "gadget needs 0 <= a1 < a2 < b1 < b2 <= 1, got ({a1}, {a2}, {b1}, {b2})"
            ));
        }
        Ok(Self { a1, a2, b1, b2 })
    }

    /// Bottom edge, top edge, and the two crossing quadrilaterals.
    pub fn sets(&self) -> [PlanarBody; 4] {
        [
            PlanarBody::segment(0.0, 1.0, 0.0).expect("finite"),
            PlanarBody::segment(0.0, 1.0, 1.0).expect("finite"),
            quad(self.a1, self.a2, self.b1, self.b2),
            quad(self.b1, self.b2, self.a1, self.a2),
        ]
    }

    pub fn met_by(&self, servers: &[Point2]) -> bool {
        self.sets()
            .iter()
            .all(|s| servers.iter().any(|p| s.contains(*p)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetClassification {
    pub feasible_pairs: usize,
    pub category_a: usize,
    pub category_b: usize,
    /// Feasible pairs matching neither category (up to 16 kept).
    pub outliers: Vec<(Point2, Point2)>,
    pub outlier_count: usize,
}

impl GadgetClassification {
    pub fn exactly_two_categories(&self) -> bool {
        self.category_a > 0 && self.category_b > 0 && self.outlier_count == 0
    }
}

fn category(g: &PlanarGadget, p: Point2, q: Point2) -> Option<bool> {
    let (low, high) = if p[1] <= q[1] { (p, q) } else { (q, p) };
    if low[1].abs() > INSIDE_TOL || (high[1] - 1.0).abs() > INSIDE_TOL {
        return None;
    }
    let within = |x: f64, lo: f64, hi: f64| lo - INSIDE_TOL <= x && x <= hi + INSIDE_TOL;
    if within(low[0], g.a1, g.a2) && within(high[0], g.a1, g.a2) {
        Some(true)
    } else if within(low[0], g.b1, g.b2) && within(high[0], g.b1, g.b2) {
        Some(false)
    } else {
        None
    }
}

/// Enumerates every unordered pair of points of the `resolution` lattice of
/// the unit square that meets all four gadget sets, and sorts the pairs
/// into the two expected categories.
pub fn gadget_feasible_pairs(g: &PlanarGadget, resolution: f64) -> Result<GadgetClassification> {
    if !(resolution > 0.0 && resolution <= 0.5) {
        return invalid("grid resolution must lie in (0, 0.5]");
    }
    let steps = (1.0 / resolution).round() as usize;
    let sets = g.sets();
    // Group lattice points by which of the four sets they meet.
    let mut by_mask: Vec<Vec<Point2>> = vec![Vec::new(); 16];
    for i in 0..=steps {
        for j in 0..=steps {
            let p = [i as f64 / steps as f64, j as f64 / steps as f64];
            let mask =
                sets.iter().enumerate().fold(
                    0usize,
                    |m, (s, set)| if set.contains(p) { m | 1 << s } else { m },
                );
            by_mask[mask].push(p);
        }
    }
    let mut out = GadgetClassification {
        feasible_pairs: 0,
        category_a: 0,
        category_b: 0,
        outliers: Vec::new(),
        outlier_count: 0,
    };
    for m1 in 0..16 {
        for m2 in m1..16 {
            if m1 | m2 != 15 {
                continue;
            }
            for (a, p) in by_mask[m1].iter().enumerate() {
                let start = if m1 == m2 { a + 1 } else { 0 };
                for q in &by_mask[m2][start..] {
                    out.feasible_pairs += 1;
                    match category(g, *p, *q) {
                        Some(true) => out.category_a += 1,
                        Some(false) => out.category_b += 1,
                        None => {
                            out.outlier_count += 1;
                            if out.outliers.len() < 16 {
                                out.outliers.push((*p, *q));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

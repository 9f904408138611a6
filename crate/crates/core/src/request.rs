//! Request families: the convex cost functions servers are asked to chase.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::{dot, l2_norm, Euclidean, Line, Metric};

const BODY_TOL: f64 = 1e-9;

/// A cost function over the points of a metric space.
pub trait CostFunction<M: Metric + ?Sized> {
    fn value(&self, metric: &M, x: &M::Point) -> f64;

    /// A point attaining the minimum, or `None` when the minimum is not
    /// attained at a finite point.
    fn minimizer(&self, metric: &M) -> Option<M::Point>;

    /// Global Lipschitz constant, `+inf` when unbounded.
    fn lipschitz_bound(&self) -> f64;
}

/// Requests with a declared center (the point the cost grows away from).
pub trait Centered<P> {
    fn center(&self) -> &P;
}

/// `0` on `[a, b]`, `+inf` elsewhere. Line only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct IntervalIndicator {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    a: f64,
    b: f64,
}

impl TryFrom<RawInterval> for IntervalIndicator {
    type Error = Error;
    fn try_from(raw: RawInterval) -> Result<Self> {
        Self::new(raw.a, raw.b)
    }
}

impl IntervalIndicator {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return invalid(format!("[{a}, {b}] is not a finite closed interval"));
        }
        Ok(Self { a, b })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a - BODY_TOL && x <= self.b + BODY_TOL
    }
}

impl CostFunction<Line> for IntervalIndicator {
    fn value(&self, _: &Line, x: &f64) -> f64 {
        if self.contains(*x) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn minimizer(&self, _: &Line) -> Option<f64> {
        Some(0.5 * (self.a + self.b))
    }

    fn lipschitz_bound(&self) -> f64 {
        f64::INFINITY
    }
}

/// A convex piecewise-linear function given by its knots, extended linearly
/// beyond the outer knots. Values are non-negative everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise")]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawPiecewise {
    knots: Vec<(f64, f64)>,
}

impl TryFrom<RawPiecewise> for PiecewiseLinear {
    type Error = Error;
    fn try_from(raw: RawPiecewise) -> Result<Self> {
        Self::new(raw.knots)
    }
}

impl PiecewiseLinear {
    /// Knots must have strictly increasing abscissae, non-decreasing slopes,
    /// and the function must be bounded below by zero.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return invalid("piecewise-linear request needs at least two knots");
        }
        if knots.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return invalid("knots must be finite");
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return invalid("knot abscissae must be strictly increasing");
        }
        let slopes: Vec<f64> = knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        if slopes
            .windows(2)
            .any(|s| s[1] < s[0] - 1e-12 * (1.0 + s[0].abs()))
        {
            return invalid("slopes must be non-decreasing (convexity)");
        }
        if slopes[0] > 0.0 || *slopes.last().unwrap() < 0.0 {
            return invalid("function is unbounded below");
        }
        if knots.iter().any(|(_, v)| *v < 0.0) {
            return invalid("piecewise-linear requests must be non-negative");
        }
        Ok(Self { knots })
    }

    /// `max(slope_left * (x - m), slope_right * (x - m))`, a V with apex at `m`.
    pub fn vee(m: f64, slope_left: f64, slope_right: f64) -> Result<Self> {
        if slope_left <= 0.0 || slope_right <= 0.0 {
            return invalid("vee slopes must be positive");
        }
        Self::new(vec![
            (m - 1.0, slope_left),
            (m, 0.0),
            (m + 1.0, slope_right),
        ])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn slope(&self, seg: usize) -> f64 {
        let (x0, v0) = self.knots[seg];
        let (x1, v1) = self.knots[seg + 1];
        (v1 - v0) / (x1 - x0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.knots.len();
        let seg = match self.knots.partition_point(|(kx, _)| *kx <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let (x0, v0) = self.knots[seg];
        v0 + self.slope(seg) * (x - x0)
    }

    /// Midpoint of the argmin interval; `None` if the argmin is unbounded.
    pub fn argmin(&self) -> Option<f64> {
        let n = self.knots.len();
        let vmin = self.knots.iter().map(|k| k.1).fold(f64::INFINITY, f64::min);
        let tol = 1e-12 * (1.0 + vmin.abs());
        let at_min: Vec<usize> = (0..n).filter(|&i| self.knots[i].1 <= vmin + tol).collect();
        let lo = *at_min.first().unwrap();
        let hi = *at_min.last().unwrap();
        if (lo == 0 && self.slope(0) == 0.0) || (hi == n - 1 && self.slope(n - 2) == 0.0) {
            return None;
        }
        Some(0.5 * (self.knots[lo].0 + self.knots[hi].0))
    }
}

impl CostFunction<Line> for PiecewiseLinear {
    fn value(&self, _: &Line, x: &f64) -> f64 {
        self.eval(*x).max(0.0)
    }

    fn minimizer(&self, _: &Line) -> Option<f64> {
        self.argmin()
    }

    fn lipschitz_bound(&self) -> f64 {
        (0..self.knots.len() - 1)
            .map(|s| self.slope(s).abs())
            .fold(0.0, f64::max)
    }
}

/// `scale * dist(x, center)^exponent`, defined on any metric. With
/// `exponent = 1` this is a k-median request, with `exponent = 2` k-means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerDistance<P> {
    center: P,
    exponent: f64,
    scale: f64,
}

impl<P> PowerDistance<P> {
    pub fn new(center: P, exponent: f64, scale: f64) -> Result<Self> {
        if !(exponent >= 1.0 && exponent.is_finite()) {
            return invalid(format!("exponent {exponent} must be a finite real >= 1"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("scale {scale} must be a positive finite real"));
        }
        Ok(Self {
            center,
            exponent,
            scale,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The cost as a function of the distance to the center.
    pub fn of_distance(&self, d: f64) -> f64 {
        if self.exponent == 1.0 {
            self.scale * d
        } else {
            self.scale * d.powf(self.exponent)
        }
    }
}

impl<P> Centered<P> for PowerDistance<P> {
    fn center(&self) -> &P {
        &self.center
    }
}

impl<M: Metric> CostFunction<M> for PowerDistance<M::Point> {
    fn value(&self, metric: &M, x: &M::Point) -> f64 {
        self.of_distance(metric.dist(x, &self.center))
    }

    fn minimizer(&self, _: &M) -> Option<M::Point> {
        Some(self.center.clone())
    }

    fn lipschitz_bound(&self) -> f64 {
        if self.exponent == 1.0 {
            self.scale
        } else {
            f64::INFINITY
        }
    }
}

/// `x -> w . x` on the Euclidean unit ball, `|w| <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub w: Vec<f64>,
}

impl Linear {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if l2_norm(&w) > 1.0 + 1e-12 {
            return invalid("linear loss vector must have norm at most 1");
        }
        Ok(Self { w })
    }
}

impl CostFunction<Euclidean> for Linear {
    fn value(&self, _: &Euclidean, x: &Vec<f64>) -> f64 {
        dot(&self.w, x)
    }

    /// Minimizer over the unit ball.
    fn minimizer(&self, metric: &Euclidean) -> Option<Vec<f64>> {
        let n = l2_norm(&self.w);
        if n == 0.0 {
            return Some(vec![0.0; metric.dim]);
        }
        Some(self.w.iter().map(|x| -x / n).collect())
    }

    fn lipschitz_bound(&self) -> f64 {
        l2_norm(&self.w)
    }
}

/// A convex polygon in the plane (possibly a segment or a point), as an
/// indicator: `0` inside, `+inf` outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarBody {
    hull: Vec<[f64; 2]>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn project_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    [a[0] + t * ab[0], a[1] + t * ab[1]]
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl PlanarBody {
    /// The convex hull of the given points (counter-clockwise).
    pub fn new(points: &[[f64; 2]]) -> Result<Self> {
        if points.is_empty() {
            return invalid("planar body needs at least one vertex");
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return invalid("planar body vertices must be finite");
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() <= 2 {
            return Ok(Self { hull: pts });
        }
        let mut lower: Vec<[f64; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[f64; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Ok(Self { hull: lower })
    }

    /// Horizontal segment from `(x0, y)` to `(x1, y)`.
    pub fn segment(x0: f64, x1: f64, y: f64) -> Result<Self> {
        Self::new(&[[x0, y], [x1, y]])
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.hull
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.distance(p) <= BODY_TOL
    }

    /// Euclidean distance from `p` to the body.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        dist2(p, self.project(p))
    }

    /// Closest point of the body to `p`.
    pub fn project(&self, p: [f64; 2]) -> [f64; 2] {
        let h = &self.hull;
        match h.len() {
            1 => return h[0],
            2 => return project_segment(p, h[0], h[1]),
            _ => {}
        }
        let n = h.len();
        if (0..n).all(|i| cross(h[i], h[(i + 1) % n], p) >= 0.0) {
            return p;
        }
        (0..n)
            .map(|i| project_segment(p, h[i], h[(i + 1) % n]))
            .min_by(|a, b| dist2(p, *a).total_cmp(&dist2(p, *b)))
            .unwrap()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let n = self.hull.len() as f64;
        let sx: f64 = self.hull.iter().map(|v| v[0]).sum();
        let sy: f64 = self.hull.iter().map(|v| v[1]).sum();
        [sx / n, sy / n]
    }
}

impl CostFunction<Euclidean> for PlanarBody {
    fn value(&self, metric: &Euclidean, x: &Vec<f64>) -> f64 {
        debug_assert_eq!(metric.dim, 2);
        if self.contains([x[0], x[1]]) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn minimizer(&self, _: &Euclidean) -> Option<Vec<f64>> {
        Some(self.centroid().to_vec())
    }

    fn lipschitz_bound(&self) -> f64 {
        f64::INFINITY
    }
}

/// `weight * f`, used when a request is split into equal copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaled<R> {
    pub inner: R,
    pub weight: f64,
}

impl<M: Metric, R: CostFunction<M>> CostFunction<M> for Scaled<R> {
    fn value(&self, metric: &M, x: &M::Point) -> f64 {
        self.weight * self.inner.value(metric, x)
    }

    fn minimizer(&self, metric: &M) -> Option<M::Point> {
        self.inner.minimizer(metric)
    }

    fn lipschitz_bound(&self) -> f64 {
        self.weight * self.inner.lipschitz_bound()
    }
}

impl<P, R: Centered<P>> Centered<P> for Scaled<R> {
    fn center(&self) -> &P {
        self.inner.center()
    }
}

/// The request families the line chaser and the line oracles accept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineRequest {
    Interval(IntervalIndicator),
    PiecewiseLinear(PiecewiseLinear),
    Power(PowerDistance<f64>),
}

impl LineRequest {
    pub fn power(center: f64, exponent: f64, scale: f64) -> Result<Self> {
        Ok(Self::Power(PowerDistance::new(center, exponent, scale)?))
    }

    /// Points where the function changes form; DP grids include them.
    pub fn knots(&self) -> Vec<f64> {
        match self {
            Self::Interval(i) => vec![i.a, i.b],
            Self::PiecewiseLinear(p) => p.knots.iter().map(|k| k.0).collect(),
            Self::Power(p) => vec![p.center],
        }
    }

    /// Whether the function is linear between consecutive knots.
    pub fn is_piecewise_linear(&self) -> bool {
        match self {
            Self::Interval(_) | Self::PiecewiseLinear(_) => true,
            Self::Power(p) => p.exponent == 1.0,
        }
    }
}

impl CostFunction<Line> for LineRequest {
    fn value(&self, m: &Line, x: &f64) -> f64 {
        match self {
            Self::Interval(i) => i.value(m, x),
            Self::PiecewiseLinear(p) => p.value(m, x),
            Self::Power(p) => p.value(m, x),
        }
    }

    fn minimizer(&self, m: &Line) -> Option<f64> {
        match self {
            Self::Interval(i) => i.minimizer(m),
            Self::PiecewiseLinear(p) => p.minimizer(m),
            Self::Power(p) => CostFunction::<Line>::minimizer(p, m),
        }
    }

    fn lipschitz_bound(&self) -> f64 {
        match self {
            Self::Interval(i) => i.lipschitz_bound(),
            Self::PiecewiseLinear(p) => p.lipschitz_bound(),
            Self::Power(p) => CostFunction::<Line>::lipschitz_bound(p),
        }
    }
}

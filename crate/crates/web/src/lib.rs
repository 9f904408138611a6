//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript types. Errors come back as
//! `{"error": "..."}` instead of exceptions.

use rand::Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use kchase::adversary::{gadget_feasible_pairs, PlanarGadget};
use kchase::instances::{random_line_request, LineFamily};
use kchase::line_chaser::{chase_step, potential};
use kchase::oracles::{breakpoint_grid, chasing_opt_line};
use kchase::regret::{hedge_topk, line_grid, Oblivious};
use kchase::{Configuration, CostFunction, Line, LineRequest, SeedTree};

/// Domain of the line demo.
const LO: f64 = -10.0;
const HI: f64 = 10.0;
/// Samples per request for the cost heat map.
const PROFILE_POINTS: usize = 101;

fn to_json<T: Serialize>(r: kchase::Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("serializable"),
        Err(e) => serde_json::json!({ "error": e.to_string() }).to_string(),
    }
}

#[derive(Serialize)]
pub struct LineDemo {
    pub chaser: Vec<Vec<f64>>,
    pub optimum: Vec<Vec<f64>>,
    /// Request values sampled on an even grid over the domain, one row per
    /// step, normalized to `[0, 1]` per row.
    pub profiles: Vec<Vec<f64>>,
    pub chaser_cost: f64,
    pub opt_cost: f64,
    pub bound: f64,
}

fn family(name: &str) -> kchase::Result<LineFamily> {
    Ok(match name {
        "piecewise" => LineFamily::PiecewiseLinear,
        "cone" => LineFamily::Cone,
        "quadratic" => LineFamily::Quadratic,
        "mixed" => LineFamily::Mixed,
        other => {
            return Err(kchase::Error::InvalidArgument(format!(
                "unknown family {other}"
            )))
        }
    })
}

pub fn line_demo(
    seed: u64,
    k: usize,
    horizon: usize,
    family_name: &str,
) -> kchase::Result<LineDemo> {
    if !(1..=4).contains(&k) || !(1..=60).contains(&horizon) {
        return Err(kchase::Error::InvalidArgument(
            "demo needs 1 <= k <= 4 and 1 <= horizon <= 60".into(),
        ));
    }
    let fam = family(family_name)?;
    let mut rng = SeedTree::new(seed).child("line").stream();
    let x0 = Configuration::new(&Line, (0..k).map(|_| rng.gen_range(LO..HI)).collect())?;
    let requests: Vec<LineRequest> = (0..horizon)
        .map(|_| random_line_request(&mut rng, fam, LO, HI))
        .collect();
    let opt = chasing_opt_line(&requests, &x0, &breakpoint_grid(&requests, &x0))?;

    let mut chaser = vec![x0.positions().to_vec()];
    let mut x = x0.clone();
    let mut cost = 0.0;
    for f in &requests {
        let step = chase_step(&x, f)?;
        cost += step.service + step.movement;
        x = step.post;
        chaser.push(x.positions().to_vec());
    }
    let mut optimum = vec![opt
        .trajectory
        .steps
        .first()
        .map_or(x0.positions().to_vec(), |s| s.pre.clone())];
    optimum.extend(opt.trajectory.steps.iter().map(|s| s.post.clone()));
    let y0 = Configuration::new(&Line, optimum[0].clone())?;
    let phi0 = potential(&x0, &y0)?.phi;

    let xs: Vec<f64> = (0..PROFILE_POINTS)
        .map(|i| LO + (HI - LO) * i as f64 / (PROFILE_POINTS - 1) as f64)
        .collect();
    let profiles = requests
        .iter()
        .map(|f| {
            let vals: Vec<f64> = xs.iter().map(|x| f.value(&Line, x)).collect();
            let finite = vals.iter().copied().filter(|v| v.is_finite());
            let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
            let span = if hi > lo { hi - lo } else { 1.0 };
            vals.iter()
                .map(|v| if v.is_finite() { (v - lo) / span } else { 1.0 })
                .collect()
        })
        .collect();
    Ok(LineDemo {
        chaser,
        optimum,
        profiles,
        chaser_cost: cost,
        opt_cost: opt.value,
        bound: 4.0 * k as f64 * opt.value + phi0,
    })
}

/// Random line instance chased online and solved offline. Returns server
/// paths for both, per-step request profiles and the competitive bound.
#[wasm_bindgen]
pub fn chase_line_demo(seed: u32, k: u32, horizon: u32, family: &str) -> String {
    to_json(line_demo(seed as u64, k as usize, horizon as usize, family))
}

#[derive(Serialize)]
pub struct GadgetDemo {
    pub sets: Vec<Vec<[f64; 2]>>,
    pub feasible_pairs: usize,
    pub category_a: usize,
    pub category_b: usize,
    pub outliers: usize,
    pub two_categories: bool,
}

pub fn gadget_demo(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    resolution: f64,
) -> kchase::Result<GadgetDemo> {
    if !(0.01..=0.25).contains(&resolution) {
        return Err(kchase::Error::InvalidArgument(
            "resolution must lie in [0.01, 0.25]".into(),
        ));
    }
    let g = PlanarGadget::new(a1, a2, b1, b2)?;
    let c = gadget_feasible_pairs(&g, resolution)?;
    Ok(GadgetDemo {
        sets: g.sets().iter().map(|s| s.vertices().to_vec()).collect(),
        feasible_pairs: c.feasible_pairs,
        category_a: c.category_a,
        category_b: c.category_b,
        outliers: c.outlier_count,
        two_categories: c.exactly_two_categories(),
    })
}

/// The four convex sets of a planar gadget and the classification of the
/// two-server positions meeting all of them on a lattice.
#[wasm_bindgen]
pub fn gadget_feasibility(a1: f64, a2: f64, b1: f64, b2: f64, resolution: f64) -> String {
    to_json(gadget_demo(a1, a2, b1, b2, resolution))
}

/// Whether servers at `(x1, y1)` and `(x2, y2)` meet every set of the gadget.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn gadget_meets(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
) -> String {
    to_json(PlanarGadget::new(a1, a2, b1, b2).map(|g| g.met_by(&[[x1, y1], [x2, y2]])))
}

#[derive(Serialize)]
pub struct HedgeDemo {
    pub regret: Vec<f64>,
    pub bound: Vec<f64>,
    pub opt_tuple: Vec<f64>,
}

pub fn hedge_demo(
    seed: u64,
    k: usize,
    grid_points: usize,
    horizon: usize,
) -> kchase::Result<HedgeDemo> {
    if !(1..=3).contains(&k) || !(2..=41).contains(&grid_points) || !(1..=5000).contains(&horizon) {
        return Err(kchase::Error::InvalidArgument(
            "demo needs 1 <= k <= 3, 2 <= grid points <= 41 and 1 <= horizon <= 5000".into(),
        ));
    }
    let grid = line_grid(0.0, 1.0, grid_points)?;
    let s = SeedTree::new(seed).child("hedge");
    let mut losses = s.child("losses").stream();
    // The three-point warm-up: y uniform on {0, 1/2, 1}, loss (x - y)^2.
    let mut env = Oblivious(|_| {
        let y = [0.0, 0.5, 1.0][losses.gen_range(0..3)];
        grid.losses(|x| (x[0] - y).powi(2))
    });
    let played = hedge_topk(
        &grid,
        k,
        horizon,
        (0.0, 1.0),
        &mut env,
        &mut s.child("player").stream(),
    )?;
    let tuples = kchase::regret::TupleSpace::new(grid_points, k)?;
    let ln_n = (tuples.len() as f64).ln();
    Ok(HedgeDemo {
        regret: played.curve.regret.clone(),
        bound: (1..=horizon)
            .map(|t| (t as f64 * ln_n / 2.0).sqrt())
            .collect(),
        opt_tuple: tuples
            .members(played.opt_tuple)
            .iter()
            .map(|&i| grid.points[i][0])
            .collect(),
    })
}

/// Hedge over k-subsets of an even grid on `[0, 1]` against the
/// three-point quadratic instance. Returns the regret curve and the
/// reference `sqrt(t ln N / 2)`.
#[wasm_bindgen]
pub fn hedge_regret_curve(seed: u32, k: u32, grid_points: u32, horizon: u32) -> String {
    to_json(hedge_demo(
        seed as u64,
        k as usize,
        grid_points as usize,
        horizon as usize,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_demo_respects_the_bound() {
        let d = line_demo(7, 2, 20, "mixed").unwrap();
        assert_eq!(d.chaser.len(), 21);
        assert_eq!(d.optimum.len(), 21);
        assert!(d.chaser_cost <= d.bound + 1e-6);
        assert!(d.profiles.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn exports_report_errors_as_json() {
        let v: serde_json::Value =
            serde_json::from_str(&chase_line_demo(1, 9, 10, "mixed")).unwrap();
        assert!(v["error"].is_string());
        let v: serde_json::Value =
            serde_json::from_str(&gadget_feasibility(0.5, 0.2, 0.6, 0.7, 0.05)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn gadget_demo_finds_two_categories() {
        let d = gadget_demo(0.1, 0.3, 0.6, 0.8, 0.05).unwrap();
        assert!(d.two_categories);
        assert_eq!(d.sets.len(), 4);
        assert_eq!(gadget_meets(0.1, 0.3, 0.6, 0.8, 0.2, 0.0, 0.2, 1.0), "true");
        assert_eq!(
            gadget_meets(0.1, 0.3, 0.6, 0.8, 0.2, 0.0, 0.7, 1.0),
            "false"
        );
    }

    #[test]
    fn hedge_demo_curve_has_one_point_per_round() {
        let d = hedge_demo(3, 2, 11, 200).unwrap();
        assert_eq!(d.regret.len(), 200);
        assert_eq!(d.opt_tuple.len(), 2);
        assert!(d.regret.iter().all(|r| *r >= -1e-9));
    }
}

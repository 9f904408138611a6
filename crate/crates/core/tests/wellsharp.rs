use kchase::instances::random_median_instance;
use kchase::kmedian::{run_filtered_wfa, Charging};
use kchase::metric::Euclidean;
use kchase::request::{Centered, IntervalIndicator, PiecewiseLinear, PowerDistance};
use kchase::wellsharp::{
    check_well_sharpened, kmedian_replacement, power_distance_beta, split_factor,
    WellSharpenedPipeline,
};
use kchase::{Configuration, CostFunction, Error, FiniteMetric, Line, Metric, SeedTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniform_line(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    rng.gen_range(-10.0..10.0)
}

#[test]
fn quadratic_is_sharp_with_alpha_to_gamma_minus_one() {
    let f = PowerDistance::new(0.5, 2.0, 1.0).unwrap();
    let mut rng = SeedTree::new(1).stream();
    let w =
        check_well_sharpened(&Line, &f, &0.5, 2.0, 2.0, 100_000, &mut rng, uniform_line).unwrap();
    assert!(w.accepted(), "{:?}", w.violations);
    assert!(w.sampled > 99_000);
}

#[test]
fn cone_is_sharp_with_equality() {
    let f = PowerDistance::new(0.0, 1.0, 0.7).unwrap();
    let mut rng = SeedTree::new(2).stream();
    let w =
        check_well_sharpened(&Line, &f, &0.0, 2.0, 1.0, 20_000, &mut rng, uniform_line).unwrap();
    assert!(w.accepted());
}

#[test]
fn indicator_is_rejected_with_a_triple() {
    let f = IntervalIndicator::new(-1.0, 1.0).unwrap();
    let mut rng = SeedTree::new(3).stream();
    let w = check_well_sharpened(&Line, &f, &0.0, 2.0, 0.5, 20_000, &mut rng, |r| {
        r.gen_range(-3.0..3.0)
    })
    .unwrap();
    assert!(!w.accepted());
    let v = &w.violations[0];
    assert!(2.0 * Line.dist(&v.y, &v.z) >= Line.dist(&v.x, &v.z));
    assert!(f.value(&Line, &v.x).is_infinite() && f.value(&Line, &v.y) == 0.0);
}

#[test]
fn too_small_beta_is_caught() {
    let f = PowerDistance::new(0.0, 2.0, 1.0).unwrap();
    let mut rng = SeedTree::new(4).stream();
    let w =
        check_well_sharpened(&Line, &f, &0.0, 2.0, 1.8, 20_000, &mut rng, uniform_line).unwrap();
    assert!(!w.accepted());
}

#[test]
fn power_family_grid_in_three_dimensions() {
    let metric = Euclidean::new(3).unwrap();
    let z = vec![0.3, -0.2, 1.0];
    for alpha in [1.5, 2.0, 4.0] {
        for gamma in [1.0, 1.5, 2.0] {
            let f = PowerDistance::new(z.clone(), gamma, 1.0).unwrap();
            let beta = power_distance_beta(gamma, alpha);
            let mut rng = SeedTree::new(5).child(alpha).child(gamma).stream();
            let w = check_well_sharpened(&metric, &f, &z, alpha, beta, 100_000, &mut rng, |r| {
                (0..3).map(|_| r.gen_range(-5.0..5.0)).collect()
            })
            .unwrap();
            assert!(w.accepted(), "alpha {alpha} gamma {gamma}");
        }
    }
}

/// `a * f + b * g` for two requests sharing a center.
struct Combination<F, G> {
    a: f64,
    f: F,
    b: f64,
    g: G,
}

impl<F: CostFunction<Line>, G: CostFunction<Line>> CostFunction<Line> for Combination<F, G> {
    fn value(&self, m: &Line, x: &f64) -> f64 {
        self.a * self.f.value(m, x) + self.b * self.g.value(m, x)
    }
    fn minimizer(&self, m: &Line) -> Option<f64> {
        self.f.minimizer(m)
    }
    fn lipschitz_bound(&self) -> f64 {
        f64::INFINITY
    }
}

#[test]
fn positive_combinations_stay_sharp() {
    let (alpha, beta) = (2.0, 2.0);
    let f = PowerDistance::new(1.0, 1.5, 1.0).unwrap();
    let g = PowerDistance::new(1.0, 2.0, 0.3).unwrap();
    let seeds = SeedTree::new(6);
    let wf = check_well_sharpened(
        &Line,
        &f,
        &1.0,
        alpha,
        beta,
        50_000,
        &mut seeds.child("f").stream(),
        uniform_line,
    )
    .unwrap();
    let wg = check_well_sharpened(
        &Line,
        &g,
        &1.0,
        alpha,
        beta,
        50_000,
        &mut seeds.child("g").stream(),
        uniform_line,
    )
    .unwrap();
    assert!(wf.accepted() && wg.accepted());
    let h = Combination {
        a: 0.4,
        f,
        b: 2.5,
        g,
    };
    let wh = check_well_sharpened(
        &Line,
        &h,
        &1.0,
        alpha,
        beta,
        50_000,
        &mut seeds.child("h").stream(),
        uniform_line,
    )
    .unwrap();
    assert!(wh.accepted());
}

#[test]
fn replacement_examples() {
    let f = PowerDistance::new(0.0, 2.0, 1.0).unwrap();
    let r = kmedian_replacement(&Line, &f, &0.0, &2.0).unwrap();
    assert_eq!(r.c, 2.0);
    assert_eq!(r.value(&Line, &-3.0), 6.0);
    let check = r.check_implication(&Line, &f, &3.0, 2.0, 2.0);
    assert!(check.premise && check.conclusion);

    let cone = PowerDistance::new(0.0, 1.0, 0.5).unwrap();
    let r = kmedian_replacement(&Line, &cone, &0.0, &4.0).unwrap();
    for y in [-3.0, 0.0, 1.5, 8.0] {
        assert_eq!(r.value(&Line, &y), cone.value(&Line, &y));
    }
    assert_eq!(
        kmedian_replacement(&Line, &f, &0.0, &0.0).unwrap_err(),
        Error::DegenerateAnchor
    );
}

#[test]
fn split_factor_examples() {
    let servers = |xs: &[f64]| Configuration::new(&Line, xs.to_vec()).unwrap();
    let quad = PowerDistance::new(0.0, 2.0, 1.0).unwrap();
    assert_eq!(
        split_factor(&Line, &quad, &0.0, &servers(&[2.0, 5.0])).unwrap(),
        5
    );
    let cone = PowerDistance::new(0.0, 1.0, 0.6).unwrap();
    assert_eq!(
        split_factor(&Line, &cone, &0.0, &servers(&[-7.0, 3.0])).unwrap(),
        1
    );
    let unit = PowerDistance::new(0.0, 1.0, 1.0).unwrap();
    assert_eq!(
        split_factor(&Line, &unit, &0.0, &servers(&[40.0, 90.0])).unwrap(),
        1
    );

    let lifted = PiecewiseLinear::new(vec![(-1.0, 2.0), (0.0, 1.0), (1.0, 2.0)]).unwrap();
    assert!(matches!(
        split_factor(&Line, &lifted, &0.0, &servers(&[0.0, 3.0])),
        Err(Error::InvalidArgument(_))
    ));
    let steep = PowerDistance::new(0.0, 2.0, 1e5).unwrap();
    assert!(matches!(
        split_factor(&Line, &steep, &0.0, &servers(&[1.0])),
        Err(Error::Capacity { .. })
    ));
}

#[test]
fn occupied_center_is_free_and_skips_the_backend() {
    let m = FiniteMetric::from_line(&[0.0, 1.0, 3.0, 7.0]).unwrap();
    let start = Configuration::new(&m, vec![1, 3]).unwrap();
    let mut p =
        WellSharpenedPipeline::new(&m, &start, SeedTree::new(0).stream(), Charging::Blind).unwrap();
    let step = p
        .respond(&m, &PowerDistance::new(3usize, 2.0, 1.0).unwrap())
        .unwrap();
    assert_eq!((step.service, step.movement), (0.0, 0.0));
    assert!(step.coefficients.is_empty());
}

#[test]
fn far_quadratic_uses_anchor_coefficient() {
    let m = FiniteMetric::from_line(&[0.0, 1.0, 3.0, 7.0]).unwrap();
    let start = Configuration::new(&m, vec![0, 1]).unwrap();
    let f = PowerDistance::new(2usize, 2.0, 0.1).unwrap();
    let mut p =
        WellSharpenedPipeline::new(&m, &start, SeedTree::new(0).stream(), Charging::Blind).unwrap();
    let step = p.respond(&m, &f).unwrap();
    // Nearest server is at 1.0, two away from the center: f = 0.4, c = 0.2.
    assert_eq!(step.pieces, 1);
    assert!((step.coefficients[0] - 0.2).abs() < 1e-15);
    let passed = step.movement > 0.0;
    if passed {
        assert!(step.post.contains(&2));
    } else {
        assert_eq!(step.post, start);
    }
    // Blind charge is f at the anchor.
    assert!((step.service - 0.4).abs() < 1e-12);
}

#[test]
fn cone_requests_reproduce_the_filter() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_median_instance(&mut rng, 6, 2, 30, 2, 0.05).unwrap();
        let coins = SeedTree::new(seed).child("coins");
        let filtered = run_filtered_wfa(&inst, Charging::Standard, coins.stream()).unwrap();
        let mut p = WellSharpenedPipeline::new(
            &inst.metric,
            &inst.start,
            coins.stream(),
            Charging::Standard,
        )
        .unwrap();
        for (r, expect) in inst.requests.iter().zip(&filtered.steps) {
            let cone = PowerDistance::new(*r.center(), 1.0, r.c()).unwrap();
            let step = p.respond(&inst.metric, &cone).unwrap();
            assert_eq!(
                step.post, expect.post,
                "seed {seed} {step:?} {expect:?} {r:?}"
            );
            assert!((step.movement - expect.movement).abs() < 1e-12);
        }
    }
}

#[test]
fn pipeline_is_move_to_minimum_and_respects_the_implication() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let inst = random_median_instance(&mut rng, 7, 2, 1, 2, 1.0).unwrap();
        let alpha = 2.0;
        let mut p = WellSharpenedPipeline::new(
            &inst.metric,
            &inst.start,
            SeedTree::new(seed).stream(),
            Charging::Blind,
        )
        .unwrap()
        .with_certificate(alpha, power_distance_beta(2.0, alpha));
        for _ in 0..25 {
            let gamma = rng.gen_range(1.0..=2.0);
            let f = PowerDistance::new(rng.gen_range(0..7usize), gamma, 1.0).unwrap();
            let mut step = p.respond(&inst.metric, &f).unwrap();
            assert_eq!(step.mtm_violations, 0);
            assert_eq!(step.implication_failures, 0);
            step.coefficients.retain(|c| *c > 1.0 + 1e-12);
            assert!(step.coefficients.is_empty());
        }
    }
}

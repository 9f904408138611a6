use kchase::instances::random_median_instance;
use kchase::kmedian::{
    is_move_to_minimum, run_filtered_wfa, split_heavy, verify_cost_chain, Blind, Charging,
    MedianInstance, MedianRequest, RandomizedFilter, Verdict,
};
use kchase::kserver::{DoubleCoverage, WorkFunctionAlgorithm};
use kchase::line_chaser::LineChaser;
use kchase::online::Chaser;
use kchase::{Configuration, FiniteMetric, Line, LineRequest, SeedTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, n: usize, k: usize, len: usize, c_min: f64) -> MedianInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_median_instance(&mut rng, n, k, len, 2, c_min).unwrap()
}

#[test]
fn weights_are_validated_and_split() {
    assert!(MedianRequest::new(0.0, 1usize).is_err());
    assert!(MedianRequest::new(1.5, 1usize).is_err());
    let parts = split_heavy(2.5, 3usize).unwrap();
    assert_eq!(parts.len(), 3);
    assert!(parts.iter().all(|p| (p.c() - 2.5 / 3.0).abs() < 1e-15));
    assert_eq!(split_heavy(0.4, 0usize).unwrap().len(), 1);
}

#[test]
fn weight_one_always_passes() {
    let m = FiniteMetric::uniform(4).unwrap();
    let wfa = WorkFunctionAlgorithm::new(&m, &Configuration::new(&m, vec![0, 1]).unwrap()).unwrap();
    let mut filter = RandomizedFilter::new(wfa, SeedTree::new(1).stream());
    for t in 0..200 {
        filter
            .respond(&m, &MedianRequest::new(1.0, t % 4).unwrap())
            .unwrap();
        assert!(filter.last_decision().unwrap().passed);
    }
}

#[test]
fn half_weight_passes_half_the_time() {
    let m = FiniteMetric::uniform(4).unwrap();
    let wfa = WorkFunctionAlgorithm::new(&m, &Configuration::new(&m, vec![0, 1]).unwrap()).unwrap();
    let mut filter = RandomizedFilter::new(wfa, SeedTree::new(9).child("coins").stream());
    let mut passed = 0;
    for t in 0..10_000 {
        filter
            .respond(&m, &MedianRequest::new(0.5, t % 4).unwrap())
            .unwrap();
        let d = filter.last_decision().unwrap();
        assert_eq!(d.passed, d.coin < 0.5);
        passed += d.passed as usize;
    }
    let rate = passed as f64 / 10_000.0;
    assert!((rate - 0.5).abs() <= 0.02, "pass rate {rate}");
}

#[test]
fn occupied_center_costs_nothing() {
    let m = FiniteMetric::uniform(4).unwrap();
    let wfa = WorkFunctionAlgorithm::new(&m, &Configuration::new(&m, vec![0, 2]).unwrap()).unwrap();
    let mut filter = RandomizedFilter::new(wfa, SeedTree::new(3).stream());
    let step = filter
        .respond(&m, &MedianRequest::new(1.0, 2).unwrap())
        .unwrap();
    assert_eq!((step.service, step.movement), (0.0, 0.0));
}

#[test]
fn replays_are_identical() {
    let inst = instance(4, 6, 2, 30, 0.1);
    let a = run_filtered_wfa(
        &inst,
        Charging::Standard,
        SeedTree::new(5).child(0).stream(),
    )
    .unwrap();
    let b = run_filtered_wfa(
        &inst,
        Charging::Standard,
        SeedTree::new(5).child(0).stream(),
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn blind_charging_properties() {
    for seed in 0..20 {
        let inst = instance(seed, 6, 2, 25, 0.05);
        let standard =
            run_filtered_wfa(&inst, Charging::Standard, SeedTree::new(seed).stream()).unwrap();
        let blind = run_filtered_wfa(&inst, Charging::Blind, SeedTree::new(seed).stream()).unwrap();
        assert_eq!(standard.passed, blind.passed);
        for (s, b) in standard.steps.iter().zip(&blind.steps) {
            assert_eq!(s.post, b.post);
            assert!(b.service <= s.service + s.movement + 1e-9);
            if s.movement == 0.0 {
                assert_eq!(b.service, s.service);
            }
        }
    }
}

#[test]
fn blind_rejects_steep_requests() {
    let mut chaser = Blind::new(LineChaser::new(
        Configuration::new(&Line, vec![0.0]).unwrap(),
    ));
    let err = chaser
        .respond(&Line, &LineRequest::power(3.0, 2.0, 1.0).unwrap())
        .unwrap_err();
    assert!(matches!(err, kchase::Error::InvalidArgument(_)));

    // A unit-weight request is served at its center after a move of length m,
    // so the blind charge is at most m.
    let m = FiniteMetric::from_line(&[0.0, 1.0, 4.0, 9.0]).unwrap();
    let wfa = WorkFunctionAlgorithm::new(&m, &Configuration::new(&m, vec![0, 1]).unwrap()).unwrap();
    let mut filter = Blind::new(RandomizedFilter::new(wfa, SeedTree::new(0).stream()));
    let step = filter
        .respond(&m, &MedianRequest::new(1.0, 3).unwrap())
        .unwrap();
    assert!(step.post.contains(&3));
    assert!(step.movement > 0.0 && step.service <= step.movement + 1e-12);
}

#[test]
fn double_coverage_backend_is_not_move_to_minimum() {
    let dc = DoubleCoverage::new(Configuration::new(&Line, vec![0.0, 10.0]).unwrap());
    let mut filter = RandomizedFilter::new(dc, SeedTree::new(0).stream());
    let step = filter
        .respond(&Line, &MedianRequest::new(1.0, 4.0).unwrap())
        .unwrap();
    assert_eq!(step.post.positions(), &[4.0, 6.0]);
    assert!(!is_move_to_minimum(&Line, &step.pre, &step.post, &4.0));
}

#[test]
fn unit_weights_make_the_filter_the_identity() {
    let mut inst = instance(8, 6, 2, 20, 0.5);
    inst.requests = inst
        .requests
        .iter()
        .map(|r| MedianRequest::new(1.0, *kchase::request::Centered::center(r)).unwrap())
        .collect();
    let rep = verify_cost_chain(&inst, Charging::Standard, 50, &SeedTree::new(1)).unwrap();
    assert_eq!(rep.mean_filter_cost, rep.mean_server_cost);
    assert_eq!(rep.flags.filter_vs_server, Verdict::Holds);
}

#[test]
fn tiny_weights_rarely_move() {
    let inst = instance(12, 6, 2, 50, 1e-3);
    let inst = MedianInstance {
        requests: inst
            .requests
            .iter()
            .map(|r| MedianRequest::new(1e-3, *kchase::request::Centered::center(r)).unwrap())
            .collect(),
        ..inst
    };
    let rep = verify_cost_chain(&inst, Charging::Standard, 10_000, &SeedTree::new(2)).unwrap();
    assert!(rep.mean_server_cost < 0.2, "{}", rep.mean_server_cost);
    assert!(rep.flags.all_hold(), "{:?}", rep.flags);
}

#[test]
fn too_few_trials_are_flagged() {
    let inst = instance(1, 5, 2, 10, 0.2);
    let rep = verify_cost_chain(&inst, Charging::Standard, 5, &SeedTree::new(0)).unwrap();
    assert_eq!(rep.flags.filter_vs_server, Verdict::Underpowered);
    assert!(!rep.flags.all_hold());
}

#[test]
fn chain_holds_on_random_instance_in_both_modes() {
    let inst = instance(21, 6, 2, 20, 0.05);
    for charging in [Charging::Standard, Charging::Blind] {
        let rep = verify_cost_chain(&inst, charging, 2000, &SeedTree::new(77)).unwrap();
        assert!(rep.flags.all_hold(), "{charging:?}: {rep:?}");
        assert_eq!(rep.mtm_violations, 0);
    }
}

#[test]
fn embedding_dimension_does_not_change_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let low: Vec<Vec<f64>> = (0..6)
        .map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
        .collect();
    let high: Vec<Vec<f64>> = low
        .iter()
        .map(|p| {
            let mut q = vec![0.0; 10];
            q[3] = p[0];
            q[7] = p[1];
            q
        })
        .collect();
    let base = instance(31, 6, 2, 30, 0.1);
    let run = |pts: &[Vec<f64>]| {
        let metric = FiniteMetric::from_points(pts).unwrap();
        let start = Configuration::new(&metric, base.start.positions().to_vec()).unwrap();
        let inst = MedianInstance {
            metric,
            requests: base.requests.clone(),
            start,
        };
        run_filtered_wfa(&inst, Charging::Standard, SeedTree::new(4).stream()).unwrap()
    };
    assert_eq!(run(&low), run(&high));
}

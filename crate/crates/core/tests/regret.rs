use kchase::regret::{
    ball_grid, ftl_topk, hedge_subsets, hedge_topk, line_grid, play, rademacher_estimate,
    static_opt_topk, Environment, FollowTheLeader, Hedge, Oblivious, Player, TupleSpace,
};
use kchase::{Error, SeedTree};
use proptest::prelude::*;
use rand::Rng;

fn subsets_by_bitmask(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

#[test]
fn tuple_space_lists_every_subset_in_order() {
    for n in 1..=7 {
        for k in 1..=n {
            let space = TupleSpace::new(n, k).unwrap();
            let listed: Vec<Vec<usize>> = (0..space.len()).map(|t| space.members(t)).collect();
            assert_eq!(listed, subsets_by_bitmask(n, k), "n={n} k={k}");
        }
    }
    assert!(matches!(
        TupleSpace::new(1000, 3),
        Err(Error::Capacity { .. })
    ));
    assert!(TupleSpace::new(3, 4).is_err());
}

#[test]
fn ball_grid_stays_in_the_ball() {
    let g = ball_grid(2, 0.25).unwrap();
    assert!(g
        .points
        .iter()
        .all(|p| p.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12));
    // Lattice points of (Z/4)^2 inside the unit disk: integer points in a radius-4 disk.
    let expected = (-4i32..=4)
        .flat_map(|a| (-4i32..=4).map(move |b| (a, b)))
        .filter(|(a, b)| a * a + b * b <= 16)
        .count();
    assert_eq!(g.len(), expected);
}

#[test]
fn hedge_on_a_fixed_linear_loss_meets_its_bound() {
    let grid = line_grid(-1.0, 1.0, 201).unwrap();
    let losses = grid.linear_losses(&[1.0]);
    let horizon = 1000;
    let mut rng = SeedTree::new(1).stream();
    let run = hedge_topk(
        &grid,
        1,
        horizon,
        (-1.0, 1.0),
        &mut Oblivious(|_| losses.clone()),
        &mut rng,
    )
    .unwrap();
    let n = 201.0_f64;
    let bound = (horizon as f64 * n.ln() / 2.0).sqrt() + horizon as f64 / 201.0;
    assert!(
        run.curve.final_regret() <= bound,
        "{} > {bound}",
        run.curve.final_regret()
    );
    assert_eq!(run.opt_tuple, 0);
    assert!((run.opt_value + horizon as f64).abs() < 1e-9);
}

#[test]
fn single_candidate_and_zero_losses_have_no_regret() {
    let one = line_grid(0.0, 0.0, 1).unwrap();
    let mut rng = SeedTree::new(2).stream();
    let mut env = Oblivious(|t: usize| vec![(t % 7) as f64 / 7.0]);
    let run = hedge_topk(&one, 1, 50, (0.0, 1.0), &mut env, &mut rng).unwrap();
    assert!(run.curve.regret.iter().all(|r| r.abs() < 1e-12));

    let grid = line_grid(-1.0, 1.0, 11).unwrap();
    let mut hedge = Hedge::new(TupleSpace::new(11, 2).unwrap(), 100, (0.0, 1.0)).unwrap();
    let run = play(
        &mut hedge,
        &mut Oblivious(|_| vec![0.0; grid.len()]),
        100,
        &mut rng,
    )
    .unwrap();
    let uniform = 1.0 / hedge.weights().len() as f64;
    assert!(hedge.weights().iter().all(|w| (w - uniform).abs() < 1e-15));
    assert!(run.curve.regret.iter().all(|r| *r == 0.0));
}

#[test]
fn prefix_optimum_is_the_exact_static_optimum() {
    let grid = line_grid(0.0, 1.0, 21).unwrap();
    let mut rng = SeedTree::new(3).stream();
    let rounds: Vec<Vec<f64>> = (0..60)
        .map(|_| {
            let y: f64 = rng.gen();
            grid.losses(|x| (x[0] - y).abs())
        })
        .collect();
    let space = TupleSpace::new(21, 2).unwrap();
    let mut hedge = Hedge::new(space.clone(), 60, (0.0, 1.0)).unwrap();
    let rs = rounds.clone();
    let run = play(
        &mut hedge,
        &mut Oblivious(move |t: usize| rs[t].clone()),
        60,
        &mut rng,
    )
    .unwrap();
    for t in [1, 10, 33, 60] {
        let (v, _) = static_opt_topk(&space, &rounds[..t]).unwrap();
        assert!((run.curve.opt[t - 1] - v).abs() < 1e-9);
    }
    // Brute force over pairs, independent of the tuple machinery.
    let mut best = f64::INFINITY;
    for a in 0..21 {
        for b in a + 1..21 {
            let total: f64 = rounds.iter().map(|l| l[a].min(l[b])).sum();
            best = best.min(total);
        }
    }
    assert!((run.opt_value - best).abs() < 1e-9);
}

#[test]
fn static_optimum_examples() {
    let grid = line_grid(0.0, 1.0, 11).unwrap();
    let space1 = TupleSpace::new(11, 1).unwrap();
    let (v, t) = static_opt_topk(&space1, &[grid.losses(|x| (x[0] - 0.3).abs())]).unwrap();
    assert!(v.abs() < 1e-12);
    assert!((grid.points[space1.members(t)[0]][0] - 0.3).abs() < 1e-12);

    let space2 = TupleSpace::new(11, 2).unwrap();
    let rounds: Vec<Vec<f64>> = (0..10)
        .map(|t| {
            if t % 2 == 0 {
                grid.losses(|x| x[0].abs())
            } else {
                grid.losses(|x| (x[0] - 1.0).abs())
            }
        })
        .collect();
    let (v, t) = static_opt_topk(&space2, &rounds).unwrap();
    assert_eq!(v, 0.0);
    assert_eq!(space2.members(t), vec![0, 10]);
}

#[test]
fn warm_up_instance_optimum_is_one_of_the_two_predicted_pairs() {
    let grid = line_grid(0.0, 1.0, 101).unwrap();
    let space = TupleSpace::new(101, 2).unwrap();
    let mut rng = SeedTree::new(4).child("warm-up").stream();
    let ys: Vec<f64> = (0..3000)
        .map(|_| [0.0, 0.5, 1.0][rng.gen_range(0..3)])
        .collect();
    let rounds: Vec<Vec<f64>> = ys
        .iter()
        .map(|y| grid.losses(|x| (x[0] - y).powi(2)))
        .collect();
    let (_, t) = static_opt_topk(&space, &rounds).unwrap();
    let pair: Vec<f64> = space
        .members(t)
        .iter()
        .map(|&m| grid.points[m][0])
        .collect();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    assert!(
        (close(pair[0], 0.0) && close(pair[1], 0.75))
            || (close(pair[0], 0.25) && close(pair[1], 1.0)),
        "{pair:?}"
    );
}

#[test]
fn ftl_plays_the_endpoint_against_the_cumulative_gradient() {
    let grid = line_grid(-1.0, 1.0, 21).unwrap();
    let mut ftl = FollowTheLeader::new(TupleSpace::new(21, 1).unwrap());
    let mut rng = SeedTree::new(0).stream();
    let gradients = [0.3, -0.5, -0.2, 0.9, 0.1];
    let mut g = 0.0;
    for &w in &gradients {
        ftl.observe(&grid.linear_losses(&[w]));
        g += w;
        let chosen = ftl.choose(&mut rng);
        let x = grid.points[ftl.space().members(chosen)[0]][0];
        assert_eq!(x, -g.signum());
    }
}

#[test]
fn ftl_average_regret_vanishes_on_symmetric_noise() {
    let grid = line_grid(-1.0, 1.0, 21).unwrap();
    let w = 0.7;
    let horizons = [500usize, 2000, 8000];
    let mut per_step = Vec::new();
    for &h in &horizons {
        let mut total = 0.0;
        for seed in 0..20 {
            let mut rng = SeedTree::new(seed).child("pm").stream();
            let plus = grid.linear_losses(&[w]);
            let minus = grid.linear_losses(&[-w]);
            let mut env = Oblivious(|_| {
                if rng.gen::<bool>() {
                    plus.clone()
                } else {
                    minus.clone()
                }
            });
            total += ftl_topk(&grid, 1, h, &mut env)
                .unwrap()
                .curve
                .final_regret();
        }
        per_step.push(total / 20.0 / h as f64);
    }
    assert!(per_step.windows(2).all(|p| p[1] < p[0]), "{per_step:?}");
    assert!(per_step[2] < 0.03, "{per_step:?}");
}

#[test]
fn ftl_regret_on_three_point_linear_losses_grows_like_sqrt() {
    let grid = line_grid(-1.0, 1.0, 21).unwrap();
    let horizons = [250.0, 1000.0, 4000.0];
    let mut means = Vec::new();
    for &h in &horizons {
        let mut total = 0.0;
        for seed in 0..50 {
            let mut rng = SeedTree::new(seed).child("three-point").stream();
            let mut env = Oblivious(|_| {
                let y = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
                grid.linear_losses(&[y - 0.5])
            });
            total += ftl_topk(&grid, 1, h as usize, &mut env)
                .unwrap()
                .curve
                .final_regret();
        }
        means.push(total / 50.0);
    }
    let slope = log_log_slope(&horizons, &means);
    assert!(
        (0.35..0.65).contains(&slope),
        "slope {slope}, means {means:?}"
    );
}

#[test]
fn hedge_subsets_examples() {
    let mut rng = SeedTree::new(5).stream();
    let mut noise = SeedTree::new(5).child("noise").stream();
    let mut env = Oblivious(|_| (0..4).map(|_| noise.gen::<f64>()).collect::<Vec<_>>());
    let run = hedge_subsets(4, 4, 200, &mut env, &mut rng).unwrap();
    assert!(run.curve.regret.iter().all(|r| r.abs() < 1e-9));

    // Bernoulli arms: loss 1 with probability 1 - 1/k.
    let (n, k, horizon) = (8, 2, 5000);
    let mut draws = SeedTree::new(6).child("arms").stream();
    let mut env = Oblivious(|_| {
        (0..n)
            .map(|_| {
                if draws.gen::<f64>() < 1.0 - 1.0 / k as f64 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect::<Vec<f64>>()
    });
    let run = hedge_subsets(n, k, horizon, &mut env, &mut rng).unwrap();
    let bound = (horizon as f64 * 28f64.ln() / 2.0).sqrt() * 1.1;
    assert!(
        run.curve.final_regret() <= bound,
        "{} > {bound}",
        run.curve.final_regret()
    );
}

struct OneGoodSubset;

impl Environment for OneGoodSubset {
    // Arms 2 and 4 take turns being the only free arm, so only the pair
    // holding both of them is free every round.
    fn losses(&mut self, t: usize, _: &[usize]) -> Vec<f64> {
        let free = if t.is_multiple_of(2) { 2 } else { 4 };
        (0..6).map(|i| if i == free { 0.0 } else { 1.0 }).collect()
    }
}

#[test]
fn hedge_concentrates_on_the_only_good_subset() {
    let horizon = 2000;
    let space = TupleSpace::new(6, 2).unwrap();
    let good = space.index_of(&[2, 4]).unwrap();
    let mut hedge = Hedge::new(space, horizon, (0.0, 1.0)).unwrap();
    let mut rng = SeedTree::new(7).stream();
    play(&mut hedge, &mut OneGoodSubset, horizon / 2, &mut rng).unwrap();
    let w = hedge.weights();
    let top = w
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |b, (i, x)| if x > b.1 { (i, x) } else { b });
    assert_eq!(top.0, good);
    assert!(top.1 > 0.9, "max weight {}", top.1);
}

#[test]
fn rademacher_single_round_is_exact() {
    let grid = line_grid(-1.0, 1.0, 5).unwrap();
    let f = vec![0.8];
    // Two outcomes: eps = +1 gives sup of min_j f x_j, eps = -1 the sup of its negation.
    let space = TupleSpace::new(5, 2).unwrap();
    let vals: Vec<f64> = (0..space.len())
        .map(|t| {
            space
                .members(t)
                .iter()
                .map(|&m| f[0] * grid.points[m][0])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let plus = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let minus = vals.iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max);
    let exact = 0.5 * (plus + minus);
    let mut rng = SeedTree::new(8).stream();
    let est = rademacher_estimate(&[f], 2, &grid, 20000, &mut rng).unwrap();
    // Each draw is one of two values, so the error is binomial.
    assert!(
        (est - exact).abs() < 4.0 * 0.5 * (plus - minus).abs() / (20000f64).sqrt(),
        "{est} vs {exact}"
    );
}

#[test]
fn rademacher_for_a_repeated_loss_is_a_walk_magnitude() {
    let grid = line_grid(-1.0, 1.0, 3).unwrap();
    let t = 100;
    let f = 0.6;
    // E|S_t| for a simple walk, from the binomial distribution.
    let mut log_choose = 0.0;
    let mut mean_abs = 0.0;
    for j in 0..=t {
        if j > 0 {
            log_choose += ((t - j + 1) as f64).ln() - (j as f64).ln();
        }
        mean_abs += (log_choose - t as f64 * 2f64.ln()).exp() * (2.0 * j as f64 - t as f64).abs();
    }
    let expected = f * mean_abs / t as f64;
    assert!((expected - f * (2.0 / (std::f64::consts::PI * t as f64)).sqrt()).abs() < 0.01);
    let mut rng = SeedTree::new(9).stream();
    let est = rademacher_estimate(&vec![vec![f]; t], 1, &grid, 4000, &mut rng).unwrap();
    // Per-draw standard deviation is at most f / sqrt(t).
    let se = f / (t as f64).sqrt() / (4000f64).sqrt();
    assert!((est - expected).abs() < 4.0 * se, "{est} vs {expected}");
}

#[test]
fn rademacher_decays_like_inverse_sqrt() {
    let grid = line_grid(-1.0, 1.0, 21).unwrap();
    let ts = [100.0, 400.0, 1600.0];
    let mut rng = SeedTree::new(10).stream();
    let ests: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let losses: Vec<Vec<f64>> = (0..t as usize)
                .map(|_| vec![rng.gen_range(-1.0..1.0)])
                .collect();
            rademacher_estimate(&losses, 2, &grid, 200, &mut rng).unwrap()
        })
        .collect();
    let slope = log_log_slope(&ts, &ests);
    assert!((-0.65..-0.35).contains(&slope), "slope {slope}, {ests:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hedge_weights_stay_a_distribution(
        seed in 0u64..1000,
        n in 2usize..9,
        k in 1usize..3,
        horizon in 1usize..60,
    ) {
        prop_assume!(k <= n);
        let mut hedge = Hedge::new(TupleSpace::new(n, k).unwrap(), horizon, (0.0, 1.0)).unwrap();
        let mut rng = SeedTree::new(seed).stream();
        for _ in 0..horizon {
            let losses: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            hedge.observe(&losses);
            let w = hedge.weights();
            prop_assert!(w.iter().all(|x| *x >= 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn scaling_losses_scales_regret_and_keeps_ftl_choices(
        seed in 0u64..1000,
        exp in -3i32..4,
        lambda in 0.1f64..10.0,
    ) {
        let grid = line_grid(-1.0, 1.0, 9).unwrap();
        let mut rng = SeedTree::new(seed).stream();
        let rounds: Vec<Vec<f64>> = (0..40).map(|_| grid.linear_losses(&[rng.gen_range(-1.0..1.0)])).collect();
        let scaled = |s: f64| -> Vec<Vec<f64>> { rounds.iter().map(|l| l.iter().map(|x| x * s).collect()).collect() };
        let run = |rs: Vec<Vec<f64>>| ftl_topk(&grid, 2, 40, &mut Oblivious(move |t: usize| rs[t].clone())).unwrap();
        let base = run(rounds.clone());

        // Powers of two scale every float exactly.
        let pow = 2f64.powi(exp);
        let exact = run(scaled(pow));
        prop_assert_eq!(&exact.actions, &base.actions);
        for (a, b) in exact.curve.regret.iter().zip(&base.curve.regret) {
            prop_assert_eq!(*a, b * pow);
        }

        let general = run(scaled(lambda));
        prop_assert_eq!(&general.actions, &base.actions);
        for (a, b) in general.curve.regret.iter().zip(&base.curve.regret) {
            prop_assert!((a - b * lambda).abs() <= 1e-9 * (1.0 + b.abs() * lambda));
        }

        // Hedge with the declared range scaled alongside draws the same tuples.
        let h = |s: f64, rs: Vec<Vec<f64>>| {
            let mut r = SeedTree::new(seed).child("hedge").stream();
            hedge_topk(&grid, 2, 40, (-s, s), &mut Oblivious(move |t: usize| rs[t].clone()), &mut r).unwrap()
        };
        let hb = h(1.0, rounds.clone());
        let hs = h(pow, scaled(pow));
        prop_assert_eq!(&hs.actions, &hb.actions);
        for (a, b) in hs.curve.regret.iter().zip(&hb.curve.regret) {
            prop_assert_eq!(*a, b * pow);
        }
    }

    #[test]
    fn ftl_is_deterministic(seed in 0u64..1000) {
        let grid = line_grid(0.0, 1.0, 11).unwrap();
        let mut rng = SeedTree::new(seed).stream();
        let rounds: Vec<Vec<f64>> = (0..30).map(|_| { let y: f64 = rng.gen(); grid.losses(|x| (x[0] - y).abs()) }).collect();
        let a = ftl_topk(&grid, 2, 30, &mut Oblivious(|t: usize| rounds[t].clone())).unwrap();
        let b = ftl_topk(&grid, 2, 30, &mut Oblivious(|t: usize| rounds[t].clone())).unwrap();
        prop_assert_eq!(a.actions, b.actions);
    }

    #[test]
    fn stationary_losses_never_give_negative_regret(seed in 0u64..1000, k in 1usize..3) {
        let grid = line_grid(0.0, 1.0, 11).unwrap();
        let mut rng = SeedTree::new(seed).stream();
        let y: f64 = rng.gen();
        let l = grid.losses(|x| (x[0] - y).abs());
        let run = hedge_topk(&grid, k, 50, (0.0, 1.0), &mut Oblivious(|_| l.clone()), &mut rng).unwrap();
        prop_assert!(run.curve.regret.iter().all(|r| *r >= -1e-12));
    }
}

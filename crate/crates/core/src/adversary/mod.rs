//! Lower-bound constructions as instance generators and adaptive
//! adversaries.

mod bandit;
mod cluster;
mod gadget;
mod interval;
mod matrix;
mod pigeonhole;
mod planar;

pub use bandit::BernoulliArms;
pub use cluster::{cluster_instance, ClusterInstance, REGION_RADIUS, TRIPLE_SPACING};
pub use gadget::{gadget_feasible_pairs, GadgetClassification, PlanarGadget, Point2};
pub use interval::{hole_of, interval_union_from_kserver, reinterpretation_cost, IntervalUnion};
pub use matrix::{pair_loss, MatrixOlo};
pub use pigeonhole::{
    deterministic_regret_adversary, PigeonholeCase, PigeonholeEnvironment, PigeonholeRequest,
};
pub use planar::{
    run_gadget_game, union_chasing_opt, DoubleCoveragePlanar, GadgetGame, GadgetRound,
    GreedyPlanar, PlanarChaser,
};

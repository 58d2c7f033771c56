//! Fair submodular cover: fairness matroids, bicriteria maximization
//! subroutines, converters to the cover problem, and a benchmark harness.

pub mod bench;
pub mod continuous;
pub mod convert;
pub mod discrete;
pub mod error;
pub mod generate;
pub mod io;
pub mod matroid;
pub mod model;
pub mod oracle;
pub mod rng;

pub use continuous::{
    continuous_threshold_greedy, estimate_f, estimate_marginal, sample_count_gate,
    sample_count_subroutine, swap_round, FractionalSolution, SamplePlan,
};
pub use convert::{
    convert_continuous, convert_fair, fairness_repair, kappa_guesses, ContinuousThresholdGreedy,
    ConverterConfig, CoverResult, FsmSubroutine, GreedyFairnessBi, ThresholdFairnessBi,
};
pub use discrete::{
    beta_for_epsilon, greedy_bi, greedy_fairness_bi, greedy_fairness_bi_lazy,
    threshold_fairness_bi, FsmResult,
};
pub use error::{FairError, Result};
pub use matroid::{build_exchange_sequence, verify_exchange, ExchangeSequence, FairnessMatroid};
pub use model::{
    fairness_difference, fsc_feasible, relaxed_fairness, FairnessFractions, FscInstance,
    PartitionedUniverse, Ratio, Solution,
};
pub use oracle::{CountingOracle, CoverageOracle, SubmodularOracle, TagCoverOracle};

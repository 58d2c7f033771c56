//! Experiment harness: loads a dataset, runs every `(algorithm, τ, seed)`
//! cell, and collects [`RunRecord`]s sorted by algorithm, τ and seed.

mod config;
mod record;

use std::time::Instant;

use rayon::prelude::*;

pub use config::{Algorithm, DatasetSpec, ExperimentConfig, FairnessSpec};
pub use record::{
    emit_csv, format_value, read_csv, read_csv_from, recomputed_difference, write_csv, RunMetrics,
    RunParams, RunRecord,
};

use crate::convert::{
    convert_continuous, convert_fair, ContinuousThresholdGreedy, ConverterConfig, CoverResult,
    GreedyFairnessBi, ThresholdFairnessBi,
};
use crate::discrete::greedy_bi;
use crate::error::{FairError, Result};
use crate::generate::{generate_skewed_graph, generate_tag_collection, SkewedGraphSpec, TagCollectionSpec};
use crate::io::{load_graph, load_tagged};
use crate::model::{fairness_difference_counts, FairnessFractions, FscInstance, PartitionedUniverse, Solution};
use crate::oracle::{CountingOracle, CoverageOracle, SubmodularOracle, TagCoverOracle};

/// A loaded dataset.
#[derive(Debug, Clone)]
pub enum Objective {
    Coverage(CoverageOracle),
    Tags(TagCoverOracle),
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub universe: PartitionedUniverse,
    pub color_names: Vec<String>,
    pub objective: Objective,
}

impl Dataset {
    pub fn load(spec: &DatasetSpec) -> Result<Self> {
        let numbered = |k: usize| (0..k).map(|c| format!("c{c}")).collect::<Vec<_>>();
        Ok(match spec {
            DatasetSpec::TwitchLike { n, groups, skew, degree, majority_degree_ratio, seed } => {
                let (universe, oracle) = generate_skewed_graph(&SkewedGraphSpec {
                    n: *n,
                    groups: *groups,
                    skew: *skew,
                    degree: *degree,
                    majority_degree_ratio: *majority_degree_ratio,
                    seed: *seed,
                })?;
                Dataset {
                    color_names: numbered(universe.num_colors()),
                    universe,
                    objective: Objective::Coverage(oracle),
                }
            }
            DatasetSpec::CorelLike { n, vocabulary, min_tags, max_tags, zipf, seed } => {
                let (universe, oracle) = generate_tag_collection(&TagCollectionSpec {
                    n: *n,
                    vocabulary: *vocabulary,
                    min_tags: *min_tags,
                    max_tags: *max_tags,
                    zipf: *zipf,
                    seed: *seed,
                })?;
                Dataset {
                    color_names: numbered(universe.num_colors()),
                    universe,
                    objective: Objective::Tags(oracle),
                }
            }
            DatasetSpec::Graph { edges, labels } => {
                let (l, oracle) = load_graph(edges, labels)?;
                Dataset {
                    universe: l.universe,
                    color_names: l.color_names,
                    objective: Objective::Coverage(oracle),
                }
            }
            DatasetSpec::Tags { tags, labels } => {
                let (l, oracle) = load_tagged(tags, labels)?;
                Dataset {
                    universe: l.universe,
                    color_names: l.color_names,
                    objective: Objective::Tags(oracle),
                }
            }
        })
    }

    /// `f(U)`.
    pub fn max_value(&self) -> f64 {
        let all = self.universe.all_elements();
        match &self.objective {
            Objective::Coverage(o) => o.evaluate(&all),
            Objective::Tags(o) => o.evaluate(&all),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Use the full sample sizes for the continuous algorithm.
    pub full_samples: bool,
    /// Run cells sequentially.
    pub sequential: bool,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub records: Vec<RunRecord>,
    pub color_names: Vec<String>,
}

impl Experiment {
    pub fn num_colors(&self) -> usize {
        self.color_names.len()
    }
}

/// Loads the dataset and runs every cell. Cells that fail (for example an
/// infeasible τ) produce error records; the run continues.
pub fn run_experiment(config: &ExperimentConfig, options: RunOptions) -> Result<Experiment> {
    let dataset = Dataset::load(&config.dataset)?;
    let fractions = config.fairness.fractions(dataset.universe.num_colors())?;
    let records = run_cells(&dataset, &fractions, config, options);
    Ok(Experiment {
        records,
        color_names: dataset.color_names,
    })
}

/// Runs all cells on an already loaded dataset.
pub fn run_cells(
    dataset: &Dataset,
    fractions: &FairnessFractions,
    config: &ExperimentConfig,
    options: RunOptions,
) -> Vec<RunRecord> {
    let mut cells = Vec::new();
    for &a in &config.algorithms {
        for &tau in &config.taus {
            for &seed in &config.seeds {
                cells.push((a, tau, seed));
            }
        }
    }
    let run = |&(a, tau, seed): &(Algorithm, f64, u64)| match &dataset.objective {
        Objective::Coverage(o) => run_cell(o, &dataset.universe, fractions, config, options, a, tau, seed),
        Objective::Tags(o) => run_cell(o, &dataset.universe, fractions, config, options, a, tau, seed),
    };
    let mut records: Vec<RunRecord> = if options.sequential {
        cells.iter().map(run).collect()
    } else {
        cells.par_iter().map(run).collect()
    };
    records.sort_by(|x, y| {
        x.algorithm
            .cmp(&y.algorithm)
            .then(x.tau.total_cmp(&y.tau))
            .then(x.seed.cmp(&y.seed))
    });
    records
}

fn metrics_for<O: SubmodularOracle>(
    instance: &FscInstance<O>,
    solution: &Solution,
    queries: u64,
    wall_ms: f64,
    cover: Option<&CoverResult>,
) -> RunMetrics {
    let counts = solution.counts().to_vec();
    let f = instance.oracle.evaluate(solution.elements());
    RunMetrics {
        f,
        cost: solution.len(),
        fairness_diff: fairness_difference_counts(&counts).ok(),
        queries,
        wall_ms,
        strict_fair: instance.fractions.proportions_hold(&counts) && f >= instance.tau,
        relaxed_fair: cover.map(CoverResult::is_relaxed_fair),
        repair_complete: cover.map(|c| c.repair_complete),
        counts,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_cell<O: SubmodularOracle>(
    oracle: &O,
    universe: &PartitionedUniverse,
    fractions: &FairnessFractions,
    config: &ExperimentConfig,
    options: RunOptions,
    algorithm: Algorithm,
    tau: f64,
    seed: u64,
) -> RunRecord {
    let scale = if options.full_samples { 1.0 } else { config.scale };
    let params = RunParams {
        epsilon: config.epsilon,
        alpha: config.alpha,
        delta: config.delta,
        scale,
    };
    let name = algorithm.name();
    let counter = CountingOracle::new(oracle);
    let instance = match FscInstance::new(universe.clone(), fractions.clone(), tau, &counter) {
        Ok(i) => i,
        Err(e) => return RunRecord::failed(name, tau, seed, params, e.to_string()),
    };
    counter.reset();
    let conv = ConverterConfig {
        alpha: config.alpha,
        epsilon: config.epsilon,
        delta: config.delta,
        max_kappa: config.max_kappa,
        scale,
        seed,
        ..ConverterConfig::default()
    };
    let eps = config.epsilon;
    let start = Instant::now();
    let outcome: Result<(Solution, Option<CoverResult>)> = match algorithm {
        Algorithm::GreedyBi => greedy_bi(&instance.oracle, universe, tau, eps).map(|r| (r.solution, None)),
        Algorithm::GreedyFairnessBi => convert_fair(&instance, &GreedyFairnessBi::new(eps), &conv)
            .map(|r| (r.solution.clone(), Some(r))),
        Algorithm::ThresholdFairnessBi => {
            convert_fair(&instance, &ThresholdFairnessBi { epsilon: eps }, &conv)
                .map(|r| (r.solution.clone(), Some(r)))
        }
        Algorithm::CtgContinuous => convert_continuous(
            &instance,
            &ContinuousThresholdGreedy { epsilon: eps, delta: config.delta },
            &conv,
        )
        .map(|r| (r.solution.clone(), Some(r))),
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let queries = counter.queries();
    match outcome {
        Ok((solution, cover)) => RunRecord {
            algorithm: name.to_string(),
            tau,
            seed,
            params,
            metrics: Some(metrics_for(&instance, &solution, queries, wall_ms, cover.as_ref())),
            error: None,
        },
        Err(e) => RunRecord::failed(name, tau, seed, params, describe(&e)),
    }
}

fn describe(e: &FairError) -> String {
    match e {
        FairError::GuessesExhausted { max_kappa, best: Some(b) } => format!(
            "{e} (best value {} at kappa {max_kappa})",
            format_value(b.value)
        ),
        _ => e.to_string(),
    }
}

//! Python bindings: universes, fairness fractions, oracles, fairness
//! matroids, the maximization subroutines, the cover converters, and the
//! experiment runner.

use std::path::PathBuf;

use fairsub::bench::{self, RunOptions};
use fairsub::continuous::{self as cont, FractionalSolution, SamplePlan};
use fairsub::convert::{self as conv, ContinuousThresholdGreedy, ConverterConfig, CoverResult};
use fairsub::generate::{generate_skewed_graph, generate_tag_collection, SkewedGraphSpec, TagCollectionSpec};
use fairsub::model::fairness_difference_counts;
use fairsub::rng::seeded;
use fairsub::{
    discrete, FairError, FairnessFractions, FairnessMatroid, FscInstance, GreedyFairnessBi,
    PartitionedUniverse, SubmodularOracle, ThresholdFairnessBi,
};
use fairsub::{CoverageOracle, TagCoverOracle};
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: FairError) -> PyErr {
    match e {
        FairError::Io(e) => PyOSError::new_err(e.to_string()),
        e @ (FairError::Invariant(_) | FairError::GuessesExhausted { .. } | FairError::Exhausted { .. }) => {
            PyRuntimeError::new_err(e.to_string())
        }
        e => PyValueError::new_err(e.to_string()),
    }
}

/// Ground set `0..n` partitioned into colors.
#[pyclass(module = "fairsub_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Universe {
    inner: PartitionedUniverse,
}

#[pymethods]
impl Universe {
    /// `colors[e]` is the color of element `e`; `num_colors` defaults to
    /// one more than the largest color.
    #[new]
    #[pyo3(signature = (colors, num_colors=None))]
    fn new(colors: Vec<usize>, num_colors: Option<usize>) -> PyResult<Self> {
        let k = num_colors.unwrap_or_else(|| colors.iter().max().map_or(1, |m| m + 1));
        Ok(Self { inner: PartitionedUniverse::new(colors, k).map_err(to_py)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn num_colors(&self) -> usize {
        self.inner.num_colors()
    }

    #[getter]
    fn colors(&self) -> Vec<usize> {
        self.inner.colors().to_vec()
    }

    fn group(&self, c: usize) -> PyResult<Vec<usize>> {
        if c >= self.inner.num_colors() {
            return Err(PyValueError::new_err(format!("no color {c}")));
        }
        Ok(self.inner.group(c).to_vec())
    }

    fn counts(&self, set: Vec<usize>) -> PyResult<Vec<usize>> {
        check_ids(&set, self.inner.len())?;
        let mut c = vec![0; self.inner.num_colors()];
        for e in set {
            c[self.inner.color(e)] += 1;
        }
        Ok(c)
    }

    fn __repr__(&self) -> String {
        format!("Universe(n={}, sizes={:?})", self.inner.len(), self.inner.group_sizes())
    }
}

/// Per-color fractions `p_c ≤ q_c`.
#[pyclass(module = "fairsub_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Fractions {
    inner: FairnessFractions,
}

#[pymethods]
impl Fractions {
    #[new]
    fn new(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: FairnessFractions::from_f64(&lower, &upper).map_err(to_py)? })
    }

    #[staticmethod]
    fn uniform(num_colors: usize, lower: f64, upper: f64) -> PyResult<Self> {
        Ok(Self { inner: FairnessFractions::uniform(num_colors, lower, upper).map_err(to_py)? })
    }

    /// `(⌊p κ⌋, ⌈q κ⌉)`.
    fn integer_bounds(&self, kappa: usize) -> (Vec<usize>, Vec<usize>) {
        self.inner.integer_bounds(kappa)
    }

    /// `p_c |S| ≤ counts[c] ≤ q_c |S|` for every color.
    fn proportions_hold(&self, counts: Vec<usize>) -> PyResult<bool> {
        self.check_len(&counts)?;
        Ok(self.inner.proportions_hold(&counts))
    }

    /// `β⌊p_c|S|/β⌋ ≤ counts[c] ≤ β⌈q_c|S|/β⌉` per color.
    fn relaxed_fairness(&self, counts: Vec<usize>, beta: usize) -> PyResult<Vec<bool>> {
        self.check_len(&counts)?;
        Ok(fairsub::relaxed_fairness(&counts, beta.max(1), &self.inner))
    }
}

impl Fractions {
    fn check_len(&self, counts: &[usize]) -> PyResult<()> {
        if counts.len() != self.inner.num_colors() {
            return Err(PyValueError::new_err(format!(
                "expected {} counts, got {}",
                self.inner.num_colors(),
                counts.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone)]
enum OracleKind {
    Tags(TagCoverOracle),
    Graph(CoverageOracle),
}

macro_rules! with_oracle {
    ($kind:expr, $o:ident => $body:expr) => {
        match $kind {
            OracleKind::Tags($o) => $body,
            OracleKind::Graph($o) => $body,
        }
    };
}

/// Monotone submodular objective: tag coverage or graph coverage.
#[pyclass(module = "fairsub_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Oracle {
    inner: OracleKind,
}

fn check_ids(set: &[usize], n: usize) -> PyResult<()> {
    match set.iter().find(|&&e| e >= n) {
        Some(e) => Err(to_py(FairError::UnknownElement { element: *e, size: n })),
        None => Ok(()),
    }
}

#[pymethods]
impl Oracle {
    /// Number of distinct tags covered; `tags[x]` lists the tags of `x`.
    #[staticmethod]
    fn tags(tags: Vec<Vec<u32>>) -> Self {
        Self { inner: OracleKind::Tags(TagCoverOracle::new(tags)) }
    }

    /// Number of vertices adjacent to some member of the set (open
    /// neighborhoods; self-loops let a vertex cover itself).
    #[staticmethod]
    fn graph(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self { inner: OracleKind::Graph(CoverageOracle::from_edges(n, &edges).map_err(to_py)?) })
    }

    fn __len__(&self) -> usize {
        with_oracle!(&self.inner, o => o.ground_size())
    }

    fn evaluate(&self, set: Vec<usize>) -> PyResult<f64> {
        check_ids(&set, self.__len__())?;
        Ok(with_oracle!(&self.inner, o => o.evaluate(&set)))
    }

    fn marginal(&self, set: Vec<usize>, e: usize) -> PyResult<f64> {
        check_ids(&set, self.__len__())?;
        check_ids(&[e], self.__len__())?;
        Ok(with_oracle!(&self.inner, o => o.marginal(&set, e)))
    }
}

/// Fairness matroid `M(P, κ, l, u)`.
#[pyclass(module = "fairsub_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Matroid {
    inner: FairnessMatroid,
}

#[pymethods]
impl Matroid {
    #[new]
    fn new(universe: &Universe, kappa: usize, lower: Vec<usize>, upper: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: FairnessMatroid::new(universe.inner.clone(), kappa, lower, upper).map_err(to_py)?,
        })
    }

    /// `M(P, κ, ⌊p κ⌋, ⌈q κ⌉)`.
    #[staticmethod]
    fn from_fractions(universe: &Universe, kappa: usize, fractions: &Fractions) -> PyResult<Self> {
        Ok(Self {
            inner: FairnessMatroid::from_fractions(universe.inner.clone(), kappa, &fractions.inner)
                .map_err(to_py)?,
        })
    }

    #[getter]
    fn kappa(&self) -> usize {
        self.inner.kappa()
    }

    #[getter]
    fn lower(&self) -> Vec<usize> {
        self.inner.lower().to_vec()
    }

    #[getter]
    fn upper(&self) -> Vec<usize> {
        self.inner.upper().to_vec()
    }

    fn beta_extension(&self, beta: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.beta_extension(beta).map_err(to_py)? })
    }

    fn is_member(&self, set: Vec<usize>) -> PyResult<bool> {
        let s = fairsub::Solution::from_elements(self.inner.universe(), set).map_err(to_py)?;
        Ok(self.inner.is_member(&s))
    }

    fn can_add(&self, set: Vec<usize>, x: usize) -> PyResult<bool> {
        let s = fairsub::Solution::from_elements(self.inner.universe(), set).map_err(to_py)?;
        Ok(self.inner.can_add(&s, x))
    }

    fn rank(&self) -> usize {
        self.inner.rank().rank
    }

    fn __repr__(&self) -> String {
        format!(
            "Matroid(kappa={}, lower={:?}, upper={:?})",
            self.inner.kappa(),
            self.inner.lower(),
            self.inner.upper()
        )
    }
}

/// Output of a maximization subroutine or of `greedy_bi`.
#[pyclass(module = "fairsub_py", frozen, get_all)]
struct MaxResult {
    solution: Vec<usize>,
    value: f64,
    queries: u64,
    beta: usize,
}

/// Output of a cover converter.
#[pyclass(module = "fairsub_py", frozen, get_all)]
struct CoverOutput {
    solution: Vec<usize>,
    counts: Vec<usize>,
    value: f64,
    kappa_final: usize,
    beta: usize,
    guesses_tried: usize,
    total_queries: u64,
    relaxed_fair: bool,
    repair_complete: bool,
}

impl From<CoverResult> for CoverOutput {
    fn from(r: CoverResult) -> Self {
        Self {
            solution: r.solution.sorted(),
            counts: r.solution.counts().to_vec(),
            value: r.value,
            kappa_final: r.kappa_final,
            beta: r.beta,
            guesses_tried: r.guesses_tried,
            total_queries: r.total_queries,
            relaxed_fair: r.is_relaxed_fair(),
            repair_complete: r.repair_complete,
        }
    }
}

/// Fractional point with its decomposition into weighted independent sets.
#[pyclass(module = "fairsub_py", frozen, get_all)]
struct FractionalOutput {
    x: Vec<f64>,
    bases: Vec<(f64, Vec<usize>)>,
    beta: usize,
}

#[pyfunction]
fn greedy_bi(oracle: &Oracle, universe: &Universe, tau: f64, epsilon: f64) -> PyResult<MaxResult> {
    let r = with_oracle!(&oracle.inner, o => discrete::greedy_bi(o, &universe.inner, tau, epsilon)).map_err(to_py)?;
    Ok(MaxResult { solution: r.solution.sorted(), value: r.value, queries: r.queries, beta: 1 })
}

#[pyfunction]
#[pyo3(signature = (oracle, matroid, epsilon, lazy=true))]
fn greedy_fairness_bi(oracle: &Oracle, matroid: &Matroid, epsilon: f64, lazy: bool) -> PyResult<MaxResult> {
    let m = &matroid.inner;
    let r = if lazy {
        with_oracle!(&oracle.inner, o => discrete::greedy_fairness_bi_lazy(o, m, epsilon))
    } else {
        with_oracle!(&oracle.inner, o => discrete::greedy_fairness_bi(o, m, epsilon))
    }
    .map_err(to_py)?;
    Ok(MaxResult { solution: r.solution.sorted(), value: r.value, queries: r.queries, beta: r.beta_used })
}

#[pyfunction]
fn threshold_fairness_bi(oracle: &Oracle, matroid: &Matroid, epsilon: f64) -> PyResult<MaxResult> {
    let r = with_oracle!(&oracle.inner, o => discrete::threshold_fairness_bi(o, &matroid.inner, epsilon))
        .map_err(to_py)?;
    Ok(MaxResult { solution: r.solution.sorted(), value: r.value, queries: r.queries, beta: r.beta_used })
}

/// Continuous threshold greedy; sample counts are divided by `scale`.
#[pyfunction]
#[pyo3(signature = (oracle, matroid, epsilon, seed=0, scale=1.0))]
fn continuous_threshold_greedy(
    oracle: &Oracle,
    matroid: &Matroid,
    epsilon: f64,
    seed: u64,
    scale: f64,
) -> PyResult<FractionalOutput> {
    let m = &matroid.inner;
    let plan = SamplePlan::for_instance(m.universe().len(), m.kappa(), epsilon, seed, scale);
    let r = with_oracle!(&oracle.inner, o => cont::continuous_threshold_greedy(o, m, epsilon, 0.0, &plan))
        .map_err(to_py)?;
    Ok(FractionalOutput { x: r.x.coords().to_vec(), bases: r.x.bases().to_vec(), beta: r.beta })
}

/// Rounds a weighted family of independent sets of `matroid` to one set.
#[pyfunction]
#[pyo3(signature = (bases, matroid, seed=0))]
fn swap_round(bases: Vec<(f64, Vec<usize>)>, matroid: &Matroid, seed: u64) -> PyResult<Vec<usize>> {
    let n = matroid.inner.universe().len();
    let x = FractionalSolution::from_bases(n, bases).map_err(to_py)?;
    let mut out = cont::swap_round(&x, &matroid.inner, &mut seeded(seed)).map_err(to_py)?;
    out.retain(|&e| e < n);
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (oracle, universe, fractions, tau, algorithm="greedy-fairness-bi", epsilon=0.1, alpha=0.2, max_kappa=None))]
#[allow(clippy::too_many_arguments)]
fn convert_fair(
    oracle: &Oracle,
    universe: &Universe,
    fractions: &Fractions,
    tau: f64,
    algorithm: &str,
    epsilon: f64,
    alpha: f64,
    max_kappa: Option<usize>,
) -> PyResult<CoverOutput> {
    let config = ConverterConfig { alpha, max_kappa, ..ConverterConfig::default() };
    let r = with_oracle!(&oracle.inner, o => {
        let inst = FscInstance::new(universe.inner.clone(), fractions.inner.clone(), tau, o).map_err(to_py)?;
        match algorithm {
            "greedy-fairness-bi" => conv::convert_fair(&inst, &GreedyFairnessBi::new(epsilon), &config),
            "threshold-fairness-bi" => conv::convert_fair(&inst, &ThresholdFairnessBi { epsilon }, &config),
            other => return Err(PyValueError::new_err(format!("unknown algorithm {other:?}"))),
        }
    })
    .map_err(to_py)?;
    Ok(r.into())
}

#[pyfunction]
#[pyo3(signature = (oracle, universe, fractions, tau, epsilon=0.1, delta=0.1, alpha=0.2, scale=1.0, seed=0))]
#[allow(clippy::too_many_arguments)]
fn convert_continuous(
    oracle: &Oracle,
    universe: &Universe,
    fractions: &Fractions,
    tau: f64,
    epsilon: f64,
    delta: f64,
    alpha: f64,
    scale: f64,
    seed: u64,
) -> PyResult<CoverOutput> {
    let config = ConverterConfig { alpha, epsilon, delta, scale, seed, ..ConverterConfig::default() };
    let sub = ContinuousThresholdGreedy { epsilon, delta };
    let r = with_oracle!(&oracle.inner, o => {
        let inst = FscInstance::new(universe.inner.clone(), fractions.inner.clone(), tau, o).map_err(to_py)?;
        conv::convert_continuous(&inst, &sub, &config)
    })
    .map_err(to_py)?;
    Ok(r.into())
}

#[pyfunction]
fn build_exchange_sequence(matroid: &Matroid, beta: usize, s_perm: Vec<usize>, t: Vec<usize>) -> PyResult<Vec<usize>> {
    Ok(fairsub::build_exchange_sequence(&matroid.inner, beta, &s_perm, &t).map_err(to_py)?.entries)
}

#[pyfunction]
fn verify_exchange(matroid: &Matroid, beta: usize, s_perm: Vec<usize>, e: Vec<usize>, t: Vec<usize>) -> bool {
    fairsub::verify_exchange(&matroid.inner, beta, &s_perm, &e, &t)
}

/// Largest minus smallest color share.
#[pyfunction]
fn fairness_difference(counts: Vec<usize>) -> PyResult<f64> {
    fairness_difference_counts(&counts).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, groups=6, skew=0.6, degree=10.0, majority_degree_ratio=1.0, seed=0))]
fn generate_twitch_like(
    n: usize,
    groups: usize,
    skew: f64,
    degree: f64,
    majority_degree_ratio: f64,
    seed: u64,
) -> PyResult<(Universe, Oracle)> {
    let spec = SkewedGraphSpec { n, groups, skew, degree, majority_degree_ratio, seed };
    let (u, o) = generate_skewed_graph(&spec).map_err(to_py)?;
    Ok((Universe { inner: u }, Oracle { inner: OracleKind::Graph(o) }))
}

#[pyfunction]
#[pyo3(signature = (n, vocabulary=300, min_tags=1, max_tags=5, zipf=1.0, seed=0))]
fn generate_corel_like(
    n: usize,
    vocabulary: usize,
    min_tags: usize,
    max_tags: usize,
    zipf: f64,
    seed: u64,
) -> PyResult<(Universe, Oracle)> {
    let spec = TagCollectionSpec { n, vocabulary, min_tags, max_tags, zipf, seed };
    let (u, o) = generate_tag_collection(&spec).map_err(to_py)?;
    Ok((Universe { inner: u }, Oracle { inner: OracleKind::Tags(o) }))
}

/// One experiment cell; metric fields are `None` when the cell failed.
#[pyclass(module = "fairsub_py", frozen, get_all)]
struct Record {
    algorithm: String,
    tau: f64,
    seed: u64,
    f: Option<f64>,
    cost: Option<usize>,
    fairness_diff: Option<f64>,
    queries: Option<u64>,
    wall_ms: Option<f64>,
    counts: Option<Vec<usize>>,
    relaxed_fair: Option<bool>,
    strict_fair: Option<bool>,
    error: Option<String>,
}

/// Runs an experiment config; writes the CSV when `out` is given.
#[pyfunction]
#[pyo3(signature = (config, out=None, full_samples=false))]
fn run_experiment(config: PathBuf, out: Option<PathBuf>, full_samples: bool) -> PyResult<Vec<Record>> {
    let cfg = bench::ExperimentConfig::load(&config).map_err(to_py)?;
    let exp = bench::run_experiment(&cfg, RunOptions { full_samples, ..Default::default() }).map_err(to_py)?;
    if let Some(path) = out {
        bench::emit_csv(&path, &exp.records, exp.num_colors()).map_err(to_py)?;
    }
    Ok(exp
        .records
        .into_iter()
        .map(|r| {
            let m = r.metrics.as_ref();
            Record {
                f: m.map(|m| m.f),
                cost: m.map(|m| m.cost),
                fairness_diff: m.and_then(|m| m.fairness_diff),
                queries: m.map(|m| m.queries),
                wall_ms: m.map(|m| m.wall_ms),
                counts: m.map(|m| m.counts.clone()),
                relaxed_fair: m.and_then(|m| m.relaxed_fair),
                strict_fair: m.map(|m| m.strict_fair),
                algorithm: r.algorithm,
                tau: r.tau,
                seed: r.seed,
                error: r.error,
            }
        })
        .collect())
}

#[pymodule]
fn fairsub_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Universe>()?;
    m.add_class::<Fractions>()?;
    m.add_class::<Oracle>()?;
    m.add_class::<Matroid>()?;
    m.add_class::<MaxResult>()?;
    m.add_class::<CoverOutput>()?;
    m.add_class::<FractionalOutput>()?;
    m.add_class::<Record>()?;
    m.add_function(wrap_pyfunction!(greedy_bi, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_fairness_bi, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_fairness_bi, m)?)?;
    m.add_function(wrap_pyfunction!(continuous_threshold_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(swap_round, m)?)?;
    m.add_function(wrap_pyfunction!(convert_fair, m)?)?;
    m.add_function(wrap_pyfunction!(convert_continuous, m)?)?;
    m.add_function(wrap_pyfunction!(build_exchange_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(verify_exchange, m)?)?;
    m.add_function(wrap_pyfunction!(fairness_difference, m)?)?;
    m.add_function(wrap_pyfunction!(generate_twitch_like, m)?)?;
    m.add_function(wrap_pyfunction!(generate_corel_like, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_reaches_both_oracles() {
        let tags = OracleKind::Tags(TagCoverOracle::new(vec![vec![0, 1], vec![1]]));
        let graph = OracleKind::Graph(CoverageOracle::from_edges(3, &[(0, 1)]).unwrap());
        assert_eq!(with_oracle!(&tags, o => o.evaluate(&[0, 1])), 2.0);
        assert_eq!(with_oracle!(&graph, o => o.evaluate(&[0])), 1.0);
        assert_eq!(with_oracle!(&graph, o => o.ground_size()), 3);
    }

    #[test]
    fn ids_in_range_pass() {
        assert!(check_ids(&[0, 2], 3).is_ok());
        assert!(check_ids(&[], 0).is_ok());
    }
}

//! Converters from fair submodular maximization to fair submodular cover.
//!
//! Both converters guess the optimal cover size `κ` on a geometric grid,
//! solve the maximization problem over `M(P, κ, ⌊pκ⌋, ⌈qκ⌉)`, repair the
//! per-color counts, and stop at the first guess whose value clears the
//! gate.

use crate::continuous::{
    continuous_threshold_greedy, estimate_f, sample_count_gate, swap_round, EstimateStream,
    SamplePlan,
};
use crate::discrete::{
    beta_for_epsilon, greedy_fairness_bi, greedy_fairness_bi_lazy, threshold_fairness_bi,
    FsmResult,
};
use crate::error::{FairError, Result};
use crate::matroid::FairnessMatroid;
use crate::model::{relaxed_fairness, FairnessFractions, FscInstance, PartitionedUniverse, Solution};
use crate::oracle::{CountingOracle, SubmodularOracle};
use crate::rng::{mix_seed, seeded};

/// A discrete `(γ, β)`-bicriteria algorithm for fair submodular
/// maximization.
pub trait FsmSubroutine {
    fn name(&self) -> &'static str;
    /// Value ratio `γ`.
    fn gamma(&self) -> f64;
    /// Extension factor `β`.
    fn beta(&self) -> usize;
    fn run<O: SubmodularOracle>(&self, oracle: &O, m: &FairnessMatroid) -> Result<FsmResult>;
}

/// `(1 − ε, ⌈1/ε⌉)`.
#[derive(Debug, Clone, Copy)]
pub struct GreedyFairnessBi {
    pub epsilon: f64,
    pub lazy: bool,
}

impl GreedyFairnessBi {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon, lazy: true }
    }
}

impl FsmSubroutine for GreedyFairnessBi {
    fn name(&self) -> &'static str {
        "greedy-fairness-bi"
    }

    fn gamma(&self) -> f64 {
        1.0 - self.epsilon
    }

    fn beta(&self) -> usize {
        beta_for_epsilon(self.epsilon).unwrap_or(1)
    }

    fn run<O: SubmodularOracle>(&self, oracle: &O, m: &FairnessMatroid) -> Result<FsmResult> {
        if self.lazy {
            greedy_fairness_bi_lazy(oracle, m, self.epsilon)
        } else {
            greedy_fairness_bi(oracle, m, self.epsilon)
        }
    }
}

/// `(1 − 2ε, ⌈1/ε⌉)`.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdFairnessBi {
    pub epsilon: f64,
}

impl FsmSubroutine for ThresholdFairnessBi {
    fn name(&self) -> &'static str {
        "threshold-fairness-bi"
    }

    fn gamma(&self) -> f64 {
        1.0 - 2.0 * self.epsilon
    }

    fn beta(&self) -> usize {
        beta_for_epsilon(self.epsilon).unwrap_or(1)
    }

    fn run<O: SubmodularOracle>(&self, oracle: &O, m: &FairnessMatroid) -> Result<FsmResult> {
        threshold_fairness_bi(oracle, m, self.epsilon)
    }
}

/// Continuous threshold greedy as a `(1 − 7ε, ⌈ln(1/ε)+1⌉)` subroutine.
#[derive(Debug, Clone, Copy)]
pub struct ContinuousThresholdGreedy {
    pub epsilon: f64,
    pub delta: f64,
}

impl ContinuousThresholdGreedy {
    pub fn gamma(&self) -> f64 {
        1.0 - 7.0 * self.epsilon
    }

    pub fn beta(&self) -> usize {
        crate::continuous::beta_continuous(self.epsilon).unwrap_or(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverterConfig {
    /// Guess growth factor.
    pub alpha: f64,
    /// Overrides the subroutine's `γ` in the value gate.
    pub gamma: Option<f64>,
    /// Overrides the subroutine's `β` in the repair.
    pub beta: Option<usize>,
    /// Gate accuracy of the continuous converter.
    pub epsilon: f64,
    /// Gate failure probability of the continuous converter.
    pub delta: f64,
    /// Largest guess; defaults to `n`.
    pub max_kappa: Option<usize>,
    /// Divisor on Monte-Carlo sample counts.
    pub scale: f64,
    pub seed: u64,
}

impl Default for ConverterConfig {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            gamma: None,
            beta: None,
            epsilon: 0.1,
            delta: 0.1,
            max_kappa: None,
            scale: 1.0,
            seed: 0,
        }
    }
}

impl ConverterConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }
}

fn ceil_tol(v: f64) -> usize {
    (v - 1e-9).ceil() as usize
}

/// `κ_0 = ⌈1+α⌉`, `κ_{t+1} = ⌈(1+α)κ_t⌉`, with `max_kappa` appended as
/// the last guess if the grid steps over it.
pub fn kappa_guesses(alpha: f64, max_kappa: usize) -> Result<Vec<usize>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(FairError::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if max_kappa == 0 {
        return Err(FairError::InvalidParameter("max_kappa must be positive".into()));
    }
    let mut out = Vec::new();
    let mut k = ceil_tol(1.0 + alpha);
    while k <= max_kappa {
        out.push(k);
        k = ceil_tol((1.0 + alpha) * k as f64).max(k + 1);
    }
    if out.last() != Some(&max_kappa) {
        out.push(max_kappa);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub solution: Solution,
    /// False when the groups could not supply `βκ` elements under the caps
    /// or a lower target could not be met.
    pub complete: bool,
}

/// Tops up a subroutine output: first every color to `β⌊p_c κ⌋`, then, in
/// color order, up to `β⌈q_c κ⌉` until `|S| = βκ`. Lowest ids first.
pub fn fairness_repair(
    solution: &Solution,
    kappa: usize,
    beta: usize,
    fractions: &FairnessFractions,
) -> RepairOutcome {
    let universe = solution.universe().clone();
    let mut s = solution.clone();
    let (lower, upper) = fractions.integer_bounds(kappa);
    let target = beta * kappa;
    let mut complete = true;
    for c in 0..universe.num_colors() {
        let want = beta * lower[c];
        let mut pool = universe.group(c).iter().filter(|&&e| !solution.contains(e));
        while s.count(c) < want {
            match pool.next() {
                Some(&e) => {
                    s.insert(e);
                }
                None => {
                    complete = false;
                    break;
                }
            }
        }
    }
    if s.len() < target {
        for c in 0..universe.num_colors() {
            let cap = beta * upper[c];
            for &e in universe.group(c) {
                if s.len() >= target || s.count(c) >= cap {
                    break;
                }
                s.insert(e);
            }
        }
    }
    if s.len() < target {
        complete = false;
    }
    RepairOutcome {
        solution: s,
        complete,
    }
}

/// One guess of a converter run.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessTrace {
    pub kappa: usize,
    /// Subroutine value (discrete) or gate estimate `Y` (continuous).
    pub subroutine_value: f64,
    pub gate_threshold: f64,
    pub passed: bool,
    pub queries: u64,
}

#[derive(Debug, Clone)]
pub struct CoverResult {
    pub solution: Solution,
    pub value: f64,
    pub kappa_final: usize,
    pub beta: usize,
    pub guesses_tried: usize,
    pub total_queries: u64,
    /// Per color: `β⌊p_c|S|/β⌋ ≤ |S ∩ U_c| ≤ β⌈q_c|S|/β⌉`.
    pub relaxed_fair: Vec<bool>,
    pub repair_complete: bool,
    pub trace: Vec<GuessTrace>,
}

impl CoverResult {
    pub fn is_relaxed_fair(&self) -> bool {
        self.relaxed_fair.iter().all(|&b| b)
    }
}

fn exact_value<O: SubmodularOracle>(oracle: &O, s: &Solution) -> f64 {
    let mut state = oracle.empty_state();
    for &e in s.elements() {
        oracle.insert(&mut state, e);
    }
    oracle.value(&state)
}

fn gate_tolerance(threshold: f64) -> f64 {
    threshold - 1e-9 * threshold.abs().max(1.0)
}

fn guesses_for(universe: &PartitionedUniverse, config: &ConverterConfig) -> Result<Vec<usize>> {
    kappa_guesses(config.alpha, config.max_kappa.unwrap_or(universe.len().max(1)))
}

#[allow(clippy::too_many_arguments)]
fn build_result(
    solution: Solution,
    value: f64,
    kappa: usize,
    beta: usize,
    guesses: usize,
    queries: u64,
    fractions: &FairnessFractions,
    complete: bool,
    trace: Vec<GuessTrace>,
) -> CoverResult {
    CoverResult {
        relaxed_fair: relaxed_fairness(solution.counts(), beta, fractions),
        solution,
        value,
        kappa_final: kappa,
        beta,
        guesses_tried: guesses,
        total_queries: queries,
        repair_complete: complete,
        trace,
    }
}

/// Discrete converter: returns the first repaired solution with
/// `f(S) ≥ γτ`. Oracle queries are those made by the subroutine; the gate
/// value is read from incremental state.
pub fn convert_fair<O: SubmodularOracle, A: FsmSubroutine>(
    instance: &FscInstance<O>,
    subroutine: &A,
    config: &ConverterConfig,
) -> Result<CoverResult> {
    let universe = &instance.universe;
    let gamma = config.gamma.unwrap_or_else(|| subroutine.gamma());
    let beta = config.beta.unwrap_or_else(|| subroutine.beta());
    let threshold = gamma * instance.tau;
    let guesses = guesses_for(universe, config)?;
    let mut total_queries = 0;
    let mut trace = Vec::new();
    let mut best: Option<CoverResult> = None;
    for (t, &kappa) in guesses.iter().enumerate() {
        let m = FairnessMatroid::from_fractions(universe.clone(), kappa, &instance.fractions)?;
        let r = subroutine.run(&instance.oracle, &m)?;
        total_queries += r.queries;
        let repaired = fairness_repair(&r.solution, kappa, beta, &instance.fractions);
        let value = exact_value(&instance.oracle, &repaired.solution);
        let passed = value >= gate_tolerance(threshold);
        trace.push(GuessTrace {
            kappa,
            subroutine_value: r.value,
            gate_threshold: threshold,
            passed,
            queries: r.queries,
        });
        let result = build_result(
            repaired.solution,
            value,
            kappa,
            beta,
            t + 1,
            total_queries,
            &instance.fractions,
            repaired.complete,
            trace.clone(),
        );
        if passed {
            return Ok(result);
        }
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(result);
        }
    }
    if let Some(b) = best.as_mut() {
        b.trace = trace;
        b.total_queries = total_queries;
        b.guesses_tried = guesses.len();
    }
    Err(FairError::GuessesExhausted {
        max_kappa: *guesses.last().expect("at least one guess"),
        best: best.map(Box::new),
    })
}

/// `((1 − ε/2)γ − ε/3) τ`.
pub fn continuous_gate(gamma: f64, epsilon: f64, tau: f64) -> f64 {
    ((1.0 - epsilon / 2.0) * gamma - epsilon / 3.0) * tau
}

/// Continuous converter: per guess, runs the continuous subroutine,
/// estimates `F(x)` with the gate sample count, and on success swap-rounds
/// and repairs. All randomness derives from `config.seed`.
pub fn convert_continuous<O: SubmodularOracle>(
    instance: &FscInstance<O>,
    subroutine: &ContinuousThresholdGreedy,
    config: &ConverterConfig,
) -> Result<CoverResult> {
    let universe = &instance.universe;
    let n = universe.len();
    let counter = CountingOracle::new(&instance.oracle);
    let gamma = config.gamma.unwrap_or_else(|| subroutine.gamma());
    let beta = config.beta.unwrap_or_else(|| subroutine.beta());
    let threshold = continuous_gate(gamma, config.epsilon, instance.tau);
    let gate_samples = sample_count_gate(n, config.epsilon, config.delta, config.scale);
    let guesses = guesses_for(universe, config)?;
    let mut trace = Vec::new();
    for (t, &kappa) in guesses.iter().enumerate() {
        let before = counter.queries();
        let m = FairnessMatroid::from_fractions(universe.clone(), kappa, &instance.fractions)?;
        let plan = SamplePlan::for_instance(
            n,
            kappa,
            subroutine.epsilon,
            mix_seed(config.seed, 2 * kappa as u64),
            config.scale,
        );
        let ctg = continuous_threshold_greedy(&counter, &m, subroutine.epsilon, subroutine.delta, &plan)?;
        let mut gate_stream = EstimateStream::new(mix_seed(config.seed, 2 * kappa as u64 + 1));
        let y = estimate_f(&ctg.x, &counter, gate_samples, &mut gate_stream);
        let passed = y >= gate_tolerance(threshold);
        trace.push(GuessTrace {
            kappa,
            subroutine_value: y,
            gate_threshold: threshold,
            passed,
            queries: counter.queries() - before,
        });
        if !passed {
            continue;
        }
        let mb = m.beta_extension(ctg.beta)?;
        let mut rng = seeded(mix_seed(config.seed, u64::MAX - kappa as u64));
        let rounded = if ctg.x.has_certificate() {
            swap_round(&ctg.x, &mb, &mut rng)?
        } else {
            Vec::new()
        };
        let s = Solution::from_elements(universe, rounded)?;
        let repaired = fairness_repair(&s, kappa, beta, &instance.fractions);
        let value = exact_value(&instance.oracle, &repaired.solution);
        return Ok(build_result(
            repaired.solution,
            value,
            kappa,
            beta,
            t + 1,
            counter.queries(),
            &instance.fractions,
            repaired.complete,
            trace,
        ));
    }
    Err(FairError::GuessesExhausted {
        max_kappa: *guesses.last().expect("at least one guess"),
        best: None,
    })
}

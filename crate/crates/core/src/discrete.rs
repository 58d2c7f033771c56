//! Discrete bicriteria algorithms: the unconstrained `greedy-bi` baseline
//! and the two fairness-matroid subroutines `greedy-fairness-bi` and
//! `threshold-fairness-bi`.
//!
//! Ties between equal marginal gains are always broken towards the lowest
//! element id. Query counts include every marginal-gain computation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FairError, Result};
use crate::matroid::{FairnessMatroid, IndependentSet};
use crate::model::{PartitionedUniverse, Solution};
use crate::oracle::SubmodularOracle;

const EPS_TOL: f64 = 1e-9;

/// `β = ⌈1/ε⌉`, tolerant of `1/ε` landing a hair above an integer.
pub fn beta_for_epsilon(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(FairError::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    Ok((1.0 / epsilon - EPS_TOL).ceil().max(1.0) as usize)
}

#[derive(Debug, Clone)]
pub struct GreedyBiResult {
    pub solution: Solution,
    pub value: f64,
    pub queries: u64,
}

/// Output of an FSM subroutine run on a fairness matroid `M`.
#[derive(Debug, Clone)]
pub struct FsmResult {
    pub solution: Solution,
    pub value: f64,
    pub queries: u64,
    /// The extension factor `β`; `solution ∈ M_β`.
    pub beta_used: usize,
    pub epsilon: f64,
    /// True when the output is smaller than `β κ`.
    pub stalled: bool,
}

/// Heap entry ordered by gain descending, then id ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    gain: f64,
    id: usize,
    round: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy argmax selection. `eligible(x)` returning false discards `x` for
/// good, which is sound for downward-closed constraints. Stale gains are
/// upper bounds by submodularity, so the first fresh entry on top of the
/// heap is the exact lowest-id argmax.
struct LazyGreedy {
    heap: BinaryHeap<Candidate>,
    round: usize,
}

impl LazyGreedy {
    fn new<O: SubmodularOracle>(oracle: &O, state: &O::State, queries: &mut u64) -> Self {
        let heap = (0..oracle.ground_size())
            .map(|id| {
                *queries += 1;
                Candidate {
                    gain: oracle.gain(state, id),
                    id,
                    round: 0,
                }
            })
            .collect();
        Self { heap, round: 0 }
    }

    fn next<O, F>(
        &mut self,
        oracle: &O,
        state: &O::State,
        queries: &mut u64,
        mut eligible: F,
    ) -> Option<Candidate>
    where
        O: SubmodularOracle,
        F: FnMut(usize) -> bool,
    {
        while let Some(top) = self.heap.pop() {
            if !eligible(top.id) {
                continue;
            }
            if top.round == self.round {
                self.round += 1;
                return Some(top);
            }
            *queries += 1;
            self.heap.push(Candidate {
                gain: oracle.gain(state, top.id),
                id: top.id,
                round: self.round,
            });
        }
        None
    }
}

/// Plain greedy for submodular cover: add the best element until
/// `f(S) > (1 − ε) τ`, ignoring fairness.
pub fn greedy_bi<O: SubmodularOracle>(
    oracle: &O,
    universe: &PartitionedUniverse,
    tau: f64,
    epsilon: f64,
) -> Result<GreedyBiResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FairError::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if oracle.ground_size() != universe.len() {
        return Err(FairError::InvalidParameter(
            "oracle and universe sizes differ".into(),
        ));
    }
    let target = (1.0 - epsilon) * tau;
    let mut queries = 0;
    let mut state = oracle.empty_state();
    let mut solution = Solution::empty(universe);
    if oracle.value(&state) > target || tau <= 0.0 {
        return Ok(GreedyBiResult {
            solution,
            value: oracle.value(&state),
            queries,
        });
    }
    let mut lazy = LazyGreedy::new(oracle, &state, &mut queries);
    while oracle.value(&state) <= target {
        let picked = lazy.next(oracle, &state, &mut queries, |x| !solution.contains(x));
        match picked {
            Some(c) => {
                oracle.insert(&mut state, c.id);
                solution.insert(c.id);
            }
            None => {
                return Err(FairError::Exhausted {
                    value: oracle.value(&state),
                })
            }
        }
    }
    Ok(GreedyBiResult {
        value: oracle.value(&state),
        solution,
        queries,
    })
}

fn check_ground<O: SubmodularOracle>(oracle: &O, m: &FairnessMatroid) -> Result<()> {
    if oracle.ground_size() != m.universe().len() {
        return Err(FairError::InvalidParameter(
            "oracle and matroid ground sets differ".into(),
        ));
    }
    Ok(())
}

/// Greedy over `M_β` with `β = ⌈1/ε⌉`: repeatedly add the addable element
/// of largest marginal gain until nothing is addable. Scans every
/// candidate each round.
pub fn greedy_fairness_bi<O: SubmodularOracle>(
    oracle: &O,
    m: &FairnessMatroid,
    epsilon: f64,
) -> Result<FsmResult> {
    check_ground(oracle, m)?;
    let beta = beta_for_epsilon(epsilon)?;
    let mb = m.beta_extension(beta)?;
    let n = oracle.ground_size();
    let mut set = IndependentSet::new(&mb);
    let mut state = oracle.empty_state();
    let mut queries = 0u64;
    loop {
        let mut best: Option<(f64, usize)> = None;
        for x in 0..n {
            if !set.can_add(x) {
                continue;
            }
            queries += 1;
            let g = oracle.gain(&state, x);
            if best.map_or(true, |(bg, _)| g > bg) {
                best = Some((g, x));
            }
        }
        let Some((_, x)) = best else { break };
        set.try_insert(x);
        oracle.insert(&mut state, x);
    }
    finish(oracle, &state, set, queries, beta, epsilon, mb.kappa())
}

/// Same output as [`greedy_fairness_bi`], using lazily re-evaluated gains.
pub fn greedy_fairness_bi_lazy<O: SubmodularOracle>(
    oracle: &O,
    m: &FairnessMatroid,
    epsilon: f64,
) -> Result<FsmResult> {
    check_ground(oracle, m)?;
    let beta = beta_for_epsilon(epsilon)?;
    let mb = m.beta_extension(beta)?;
    let mut set = IndependentSet::new(&mb);
    let mut state = oracle.empty_state();
    let mut queries = 0u64;
    if (0..oracle.ground_size()).any(|x| set.can_add(x)) {
        let mut lazy = LazyGreedy::new(oracle, &state, &mut queries);
        while let Some(c) = lazy.next(oracle, &state, &mut queries, |x| set.can_add(x)) {
            set.try_insert(c.id);
            oracle.insert(&mut state, c.id);
        }
    }
    finish(oracle, &state, set, queries, beta, epsilon, mb.kappa())
}

/// Decreasing-threshold greedy over `M_β`: thresholds run from the best
/// singleton value `d` down to (exclusive) `ε d / κ`, shrinking by `1 − ε`;
/// every addable element whose gain clears the threshold is added at once.
pub fn threshold_fairness_bi<O: SubmodularOracle>(
    oracle: &O,
    m: &FairnessMatroid,
    epsilon: f64,
) -> Result<FsmResult> {
    check_ground(oracle, m)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FairError::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let beta = beta_for_epsilon(epsilon)?;
    let mb = m.beta_extension(beta)?;
    let n = oracle.ground_size();
    let mut set = IndependentSet::new(&mb);
    let mut state = oracle.empty_state();
    let mut queries = 0u64;

    let mut d = 0.0f64;
    for x in 0..n {
        if set.can_add(x) {
            queries += 1;
            d = d.max(oracle.gain(&state, x));
        }
    }
    let cutoff = epsilon * d / m.kappa() as f64;
    let full = mb.kappa();
    let mut w = d;
    'passes: while w > cutoff {
        for x in 0..n {
            if set.can_add(x) {
                queries += 1;
                if oracle.gain(&state, x) >= w {
                    set.try_insert(x);
                    oracle.insert(&mut state, x);
                }
            }
            if set.len() == full {
                break 'passes;
            }
        }
        w *= 1.0 - epsilon;
    }
    finish(oracle, &state, set, queries, beta, epsilon, full)
}

fn finish<O: SubmodularOracle>(
    oracle: &O,
    state: &O::State,
    set: IndependentSet<'_>,
    queries: u64,
    beta: usize,
    epsilon: f64,
    full: usize,
) -> Result<FsmResult> {
    let stalled = set.len() < full;
    Ok(FsmResult {
        value: oracle.value(state),
        solution: set.into_solution(),
        queries,
        beta_used: beta,
        epsilon,
        stalled,
    })
}

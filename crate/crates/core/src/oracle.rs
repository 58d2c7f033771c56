//! Monotone submodular objectives and query accounting.
//!
//! Both shipped objectives are set-union coverage functions: the
//! neighborhood coverage of a graph and the tag coverage of an annotated
//! collection. They share [`SetUnionOracle`], which keeps a covered-item
//! bitmap so that greedy loops can ask for marginal gains in `O(|set|)`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{FairError, Result};

/// A normalized (`f(∅) = 0`) monotone submodular set function over
/// `0..ground_size()`.
///
/// `State` is an incremental representation of a growing set. `gain` is a
/// marginal query against it; `insert` only updates bookkeeping.
pub trait SubmodularOracle: Sync {
    type State: Clone + Send;

    fn ground_size(&self) -> usize;

    /// `f(set)`. Panics if an element is out of range.
    fn evaluate(&self, set: &[usize]) -> f64;

    /// `f(set ∪ {e}) − f(set)`.
    fn marginal(&self, set: &[usize], e: usize) -> f64 {
        if set.contains(&e) {
            return 0.0;
        }
        let mut with = set.to_vec();
        with.push(e);
        self.evaluate(&with) - self.evaluate(set)
    }

    fn empty_state(&self) -> Self::State;

    /// `Δf(S, e)` for the set represented by `state`.
    fn gain(&self, state: &Self::State, e: usize) -> f64;

    fn insert(&self, state: &mut Self::State, e: usize);

    fn value(&self, state: &Self::State) -> f64;
}

impl<O: SubmodularOracle + ?Sized> SubmodularOracle for &O {
    type State = O::State;

    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn evaluate(&self, set: &[usize]) -> f64 {
        (**self).evaluate(set)
    }
    fn marginal(&self, set: &[usize], e: usize) -> f64 {
        (**self).marginal(set, e)
    }
    fn empty_state(&self) -> Self::State {
        (**self).empty_state()
    }
    fn gain(&self, state: &Self::State, e: usize) -> f64 {
        (**self).gain(state, e)
    }
    fn insert(&self, state: &mut Self::State, e: usize) {
        (**self).insert(state, e)
    }
    fn value(&self, state: &Self::State) -> f64 {
        (**self).value(state)
    }
}

/// Covered-item bitmap plus running count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverState {
    words: Vec<u64>,
    covered: usize,
}

impl CoverState {
    fn new(items: usize) -> Self {
        Self {
            words: vec![0; items.div_ceil(64)],
            covered: 0,
        }
    }

    #[inline]
    fn is_set(&self, item: u32) -> bool {
        let i = item as usize;
        self.words[i >> 6] & (1u64 << (i & 63)) != 0
    }

    #[inline]
    fn set(&mut self, item: u32) {
        let i = item as usize;
        let w = &mut self.words[i >> 6];
        let bit = 1u64 << (i & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.covered += 1;
        }
    }

    pub fn covered(&self) -> usize {
        self.covered
    }
}

/// `f(S) = |⋃_{x ∈ S} sets[x]|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetUnionOracle {
    sets: Vec<Vec<u32>>,
    items: usize,
}

impl SetUnionOracle {
    /// Item lists are sorted and deduplicated; `items` is one past the
    /// largest item id.
    pub fn new(mut sets: Vec<Vec<u32>>) -> Self {
        let mut items = 0usize;
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
            if let Some(&m) = s.last() {
                items = items.max(m as usize + 1);
            }
        }
        Self { sets, items }
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn num_items(&self) -> usize {
        self.items
    }

    /// `f(set)` with range checking.
    pub fn try_evaluate(&self, set: &[usize]) -> Result<f64> {
        if let Some(&bad) = set.iter().find(|&&e| e >= self.sets.len()) {
            return Err(FairError::UnknownElement {
                element: bad,
                size: self.sets.len(),
            });
        }
        Ok(self.evaluate(set))
    }
}

impl SubmodularOracle for SetUnionOracle {
    type State = CoverState;

    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let mut st = self.empty_state();
        for &e in set {
            self.insert(&mut st, e);
        }
        st.covered as f64
    }

    fn marginal(&self, set: &[usize], e: usize) -> f64 {
        let mut st = self.empty_state();
        for &x in set {
            self.insert(&mut st, x);
        }
        self.gain(&st, e)
    }

    fn empty_state(&self) -> CoverState {
        CoverState::new(self.items)
    }

    #[inline]
    fn gain(&self, state: &CoverState, e: usize) -> f64 {
        self.sets[e].iter().filter(|&&i| !state.is_set(i)).count() as f64
    }

    #[inline]
    fn insert(&self, state: &mut CoverState, e: usize) {
        for &i in &self.sets[e] {
            state.set(i);
        }
    }

    fn value(&self, state: &CoverState) -> f64 {
        state.covered as f64
    }
}

macro_rules! delegate_set_union {
    ($ty:ty) => {
        impl SubmodularOracle for $ty {
            type State = CoverState;

            fn ground_size(&self) -> usize {
                self.inner.ground_size()
            }
            fn evaluate(&self, set: &[usize]) -> f64 {
                self.inner.evaluate(set)
            }
            fn marginal(&self, set: &[usize], e: usize) -> f64 {
                self.inner.marginal(set, e)
            }
            fn empty_state(&self) -> CoverState {
                self.inner.empty_state()
            }
            fn gain(&self, state: &CoverState, e: usize) -> f64 {
                self.inner.gain(state, e)
            }
            fn insert(&self, state: &mut CoverState, e: usize) {
                self.inner.insert(state, e)
            }
            fn value(&self, state: &CoverState) -> f64 {
                self.inner.value(state)
            }
        }

        impl $ty {
            pub fn as_set_union(&self) -> &SetUnionOracle {
                &self.inner
            }

            pub fn into_set_union(self) -> SetUnionOracle {
                self.inner
            }

            pub fn try_evaluate(&self, set: &[usize]) -> Result<f64> {
                self.inner.try_evaluate(set)
            }
        }
    };
}

/// Graph neighborhood coverage `f(S) = |⋃_{v ∈ S} N(v)|`.
///
/// Neighborhoods are open: a vertex covers itself only through a self-loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageOracle {
    inner: SetUnionOracle,
}

impl CoverageOracle {
    /// Builds the oracle from an undirected edge list over `n` vertices.
    /// Duplicate edges are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(FairError::UnknownElement { element: x, size: n });
                }
            }
            adj[u].push(v as u32);
            if u != v {
                adj[v].push(u as u32);
            }
        }
        Ok(Self::from_adjacency(adj))
    }

    pub fn from_adjacency(adjacency: Vec<Vec<u32>>) -> Self {
        let n = adjacency.len();
        let mut inner = SetUnionOracle::new(adjacency);
        // Items are vertices, so the bitmap spans the whole vertex set.
        inner.items = inner.items.max(n);
        Self { inner }
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.inner.sets[v]
    }

    /// Undirected edges `(u, v)` with `u ≤ v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.inner.sets.iter().enumerate() {
            for &v in ns {
                if u <= v as usize {
                    out.push((u, v as usize));
                }
            }
        }
        out
    }
}

delegate_set_union!(CoverageOracle);

/// Tag coverage `f(S) = |⋃_{x ∈ S} t(x)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagCoverOracle {
    inner: SetUnionOracle,
}

impl TagCoverOracle {
    pub fn new(tags: Vec<Vec<u32>>) -> Self {
        Self {
            inner: SetUnionOracle::new(tags),
        }
    }

    /// Maps tag names to dense ids in first-seen order.
    pub fn from_named<S: AsRef<str>>(tags: &[Vec<S>]) -> Self {
        let mut ids: HashMap<&str, u32> = HashMap::new();
        let sets = tags
            .iter()
            .map(|ts| {
                ts.iter()
                    .map(|t| {
                        let next = ids.len() as u32;
                        *ids.entry(t.as_ref()).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        Self::new(sets)
    }

    pub fn tags(&self, x: usize) -> &[u32] {
        &self.inner.sets[x]
    }

    pub fn vocabulary_size(&self) -> usize {
        self.inner.items
    }
}

delegate_set_union!(TagCoverOracle);

/// Wraps an oracle and counts `evaluate`, `marginal` and `gain` calls.
///
/// The counter is atomic, so parallel samplers report a correct total.
#[derive(Debug)]
pub struct CountingOracle<O> {
    inner: O,
    queries: AtomicU64,
}

impl<O> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            queries: AtomicU64::new(0),
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    #[inline]
    fn tick(&self) {
        self.queries.fetch_add(1, Ordering::Relaxed);
    }
}

impl<O: SubmodularOracle> SubmodularOracle for CountingOracle<O> {
    type State = O::State;

    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn evaluate(&self, set: &[usize]) -> f64 {
        self.tick();
        self.inner.evaluate(set)
    }
    fn marginal(&self, set: &[usize], e: usize) -> f64 {
        self.tick();
        self.inner.marginal(set, e)
    }
    fn empty_state(&self) -> Self::State {
        self.inner.empty_state()
    }
    fn gain(&self, state: &Self::State, e: usize) -> f64 {
        self.tick();
        self.inner.gain(state, e)
    }
    fn insert(&self, state: &mut Self::State, e: usize) {
        self.inner.insert(state, e)
    }
    fn value(&self, state: &Self::State) -> f64 {
        self.inner.value(state)
    }
}

/// One failed check found by [`validate_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub small: Vec<usize>,
    pub large: Vec<usize>,
    pub element: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `f(Y ∪ {x}) < f(Y)`
    Monotonicity,
    /// `Δf(X, x) < Δf(Y, x)` with `X ⊆ Y`
    DiminishingReturns,
    /// `f(∅) ≠ 0`
    Normalization,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub trials: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

const VALIDATION_TOLERANCE: f64 = 1e-9;

/// Samples `X ⊆ Y ⊆ U` and `x ∉ Y` and checks monotonicity and diminishing
/// returns on each triple, plus `f(∅) = 0` once.
pub fn validate_oracle<O: SubmodularOracle, R: Rng + ?Sized>(
    oracle: &O,
    trials: usize,
    rng: &mut R,
) -> ValidationReport {
    let n = oracle.ground_size();
    let mut report = ValidationReport {
        trials,
        violations: Vec::new(),
    };
    let empty = oracle.evaluate(&[]);
    if empty.abs() > VALIDATION_TOLERANCE {
        report.violations.push(Violation {
            kind: ViolationKind::Normalization,
            small: vec![],
            large: vec![],
            element: 0,
            lhs: empty,
            rhs: 0.0,
        });
    }
    if n == 0 {
        return report;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..trials {
        perm.shuffle(rng);
        // perm[0] is x; Y is a prefix of the rest and X a prefix of Y.
        let x = perm[0];
        let y_len = rng.gen_range(0..n);
        let x_len = rng.gen_range(0..=y_len);
        let large = &perm[1..1 + y_len];
        let small = &perm[1..1 + x_len];

        let f_large = oracle.evaluate(large);
        let mut large_x = large.to_vec();
        large_x.push(x);
        let f_large_x = oracle.evaluate(&large_x);
        if f_large_x + VALIDATION_TOLERANCE < f_large {
            report.violations.push(Violation {
                kind: ViolationKind::Monotonicity,
                small: small.to_vec(),
                large: large.to_vec(),
                element: x,
                lhs: f_large_x,
                rhs: f_large,
            });
        }
        let d_small = oracle.marginal(small, x);
        let d_large = f_large_x - f_large;
        if d_small + VALIDATION_TOLERANCE < d_large {
            report.violations.push(Violation {
                kind: ViolationKind::DiminishingReturns,
                small: small.to_vec(),
                large: large.to_vec(),
                element: x,
                lhs: d_small,
                rhs: d_large,
            });
        }
    }
    report
}

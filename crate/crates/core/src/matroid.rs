//! Fairness matroids and their β-extensions.
//!
//! `M(P, κ, l, u) = { S : |S ∩ U_c| ≤ u_c ∀c, Σ_c max(|S ∩ U_c|, l_c) ≤ κ }`.
//! The β-extension scales `κ`, `l` and `u` by the integer `β`.
//!
//! Elements with id `≥ n` are treated as dummies: they belong to no color,
//! are independent in every matroid, and only appear in exchange sequences
//! and swap rounding.

use std::collections::BTreeMap;

use crate::error::{FairError, Result};
use crate::model::{FairnessFractions, PartitionedUniverse, Solution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessMatroid {
    universe: PartitionedUniverse,
    kappa: usize,
    lower: Vec<usize>,
    upper: Vec<usize>,
}

impl FairnessMatroid {
    /// Requires `l_c ≤ u_c` and `Σ l_c ≤ κ`. Whether `κ` is reachable given
    /// the upper bounds and group sizes is reported by [`Self::rank`].
    pub fn new(
        universe: PartitionedUniverse,
        kappa: usize,
        lower: Vec<usize>,
        upper: Vec<usize>,
    ) -> Result<Self> {
        let n_colors = universe.num_colors();
        if lower.len() != n_colors || upper.len() != n_colors {
            return Err(FairError::InvalidParameter(format!(
                "expected {n_colors} lower and upper bounds"
            )));
        }
        if kappa == 0 {
            return Err(FairError::InvalidParameter("kappa must be positive".into()));
        }
        if let Some(c) = (0..n_colors).find(|&c| lower[c] > upper[c]) {
            return Err(FairError::InvalidParameter(format!(
                "color {c}: lower bound {} exceeds upper bound {}",
                lower[c], upper[c]
            )));
        }
        if lower.iter().sum::<usize>() > kappa {
            return Err(FairError::InvalidParameter(format!(
                "sum of lower bounds exceeds kappa = {kappa}"
            )));
        }
        Ok(Self {
            universe,
            kappa,
            lower,
            upper,
        })
    }

    /// `M(P, κ, ⌊p κ⌋, ⌈q κ⌉)`.
    pub fn from_fractions(
        universe: PartitionedUniverse,
        kappa: usize,
        fractions: &FairnessFractions,
    ) -> Result<Self> {
        let (lower, upper) = fractions.integer_bounds(kappa);
        Self::new(universe, kappa, lower, upper)
    }

    pub fn universe(&self) -> &PartitionedUniverse {
        &self.universe
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    /// `M(P, βκ, βl, βu)`.
    pub fn beta_extension(&self, beta: usize) -> Result<Self> {
        if beta == 0 {
            return Err(FairError::InvalidParameter("beta must be at least 1".into()));
        }
        Ok(Self {
            universe: self.universe.clone(),
            kappa: self.kappa * beta,
            lower: self.lower.iter().map(|l| l * beta).collect(),
            upper: self.upper.iter().map(|u| u * beta).collect(),
        })
    }

    /// `Σ_c max(count_c, l_c)`.
    pub fn load(&self, counts: &[usize]) -> usize {
        counts
            .iter()
            .zip(&self.lower)
            .map(|(&k, &l)| k.max(l))
            .sum()
    }

    /// Membership from per-color counts.
    pub fn admits_counts(&self, counts: &[usize]) -> bool {
        counts.iter().zip(&self.upper).all(|(k, u)| k <= u) && self.load(counts) <= self.kappa
    }

    pub fn is_member(&self, solution: &Solution) -> bool {
        self.admits_counts(solution.counts())
    }

    /// Whether `S ∪ {x}` is independent; false when `x ∈ S`.
    pub fn can_add(&self, solution: &Solution, x: usize) -> bool {
        !solution.contains(x) && self.can_add_with_load(solution.counts(), self.load(solution.counts()), x)
    }

    /// `O(1)` augmentation test given the cached load of an independent set.
    #[inline]
    pub fn can_add_with_load(&self, counts: &[usize], load: usize, x: usize) -> bool {
        if x >= self.universe.len() {
            return true;
        }
        let c = self.universe.color(x);
        let k = counts[c];
        k < self.upper[c] && load + usize::from(k >= self.lower[c]) <= self.kappa
    }

    /// Greedily extends `∅` in id order and compares the result to `κ`.
    pub fn rank(&self) -> RankReport {
        let mut set = IndependentSet::new(self);
        for x in 0..self.universe.len() {
            set.try_insert(x);
        }
        let achieved = set.len();
        RankReport {
            rank: achieved,
            kappa: self.kappa,
            stalled: achieved < self.kappa,
        }
    }
}

/// Result of [`FairnessMatroid::rank`]. `stalled` means the groups are too
/// small (or the upper bounds too tight) for the rank to reach `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub kappa: usize,
    pub stalled: bool,
}

/// An independent set of a fairness matroid with its load cached, so that
/// augmentation tests run in constant time.
#[derive(Debug, Clone)]
pub struct IndependentSet<'m> {
    matroid: &'m FairnessMatroid,
    solution: Solution,
    load: usize,
}

impl<'m> IndependentSet<'m> {
    pub fn new(matroid: &'m FairnessMatroid) -> Self {
        Self {
            matroid,
            solution: Solution::empty(&matroid.universe),
            load: matroid.lower.iter().sum(),
        }
    }

    #[inline]
    pub fn can_add(&self, x: usize) -> bool {
        !self.solution.contains(x)
            && self
                .matroid
                .can_add_with_load(self.solution.counts(), self.load, x)
    }

    /// Inserts `x` if the result stays independent.
    pub fn try_insert(&mut self, x: usize) -> bool {
        if !self.can_add(x) {
            return false;
        }
        let c = self.matroid.universe.color(x);
        if self.solution.count(c) >= self.matroid.lower[c] {
            self.load += 1;
        }
        self.solution.insert(x);
        true
    }

    pub fn len(&self) -> usize {
        self.solution.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solution.is_empty()
    }

    pub fn load(&self) -> usize {
        self.load
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn into_solution(self) -> Solution {
        self.solution
    }
}

/// A sequence containing `β` copies of every element of a base `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeSequence {
    pub entries: Vec<usize>,
}

fn check_exchange_inputs(
    m: &FairnessMatroid,
    beta: usize,
    s_perm: &[usize],
    t: &[usize],
) -> Result<FairnessMatroid> {
    let mb = m.beta_extension(beta)?;
    let n = m.universe.len();
    if s_perm.len() != mb.kappa {
        return Err(FairError::Precondition(format!(
            "ordered set has {} entries, expected beta*kappa = {}",
            s_perm.len(),
            mb.kappa
        )));
    }
    let mut seen = s_perm.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(FairError::Precondition("ordered set repeats an element".into()));
    }
    let mut counts = vec![0; m.universe.num_colors()];
    for &s in s_perm.iter().filter(|&&s| s < n) {
        counts[m.universe.color(s)] += 1;
    }
    if !mb.admits_counts(&counts) {
        return Err(FairError::Precondition(
            "ordered set is not independent in the extension".into(),
        ));
    }
    let mut ts = t.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() != t.len() || ts.len() != m.kappa || ts.iter().any(|&x| x >= n) {
        return Err(FairError::Precondition(format!(
            "T must be {} distinct ground elements",
            m.kappa
        )));
    }
    let mut tcounts = vec![0; m.universe.num_colors()];
    for &x in &ts {
        tcounts[m.universe.color(x)] += 1;
    }
    if !m.admits_counts(&tcounts) {
        return Err(FairError::Precondition("T is not independent".into()));
    }
    Ok(mb)
}

/// Builds `E = (e_1, …, e_{βκ})` holding `β` copies of each element of the
/// base `T` such that `S_i ∪ {e_{i+1}}` is independent in `M_β` for every
/// prefix `S_i` of `s_perm`.
///
/// The sequence is filled from the back. At position `i` the multiset
/// `(s_1..s_{i-1}, e_{i+1}..e_{βκ})` is inspected: if some color sits below
/// `β l_c`, an element of `T` of the lowest such color is used; otherwise any
/// element of `T` whose color is below `β |T ∩ U_c|` is used. Within either
/// case the lowest admissible element id wins.
///
/// `s_perm` may contain dummy ids `≥ n` as padding.
pub fn build_exchange_sequence(
    m: &FairnessMatroid,
    beta: usize,
    s_perm: &[usize],
    t: &[usize],
) -> Result<ExchangeSequence> {
    check_exchange_inputs(m, beta, s_perm, t)?;
    let u = &m.universe;
    let n = u.len();
    let len = beta * m.kappa;

    let mut t_sorted = t.to_vec();
    t_sorted.sort_unstable();
    let mut t_per_color = vec![0usize; u.num_colors()];
    for &x in &t_sorted {
        t_per_color[u.color(x)] += 1;
    }

    // Multiplicities in the multiset F = (S_{i-1}, E_{i+1}).
    let mut group = vec![0usize; u.num_colors()];
    let mut mult: BTreeMap<usize, usize> = t_sorted.iter().map(|&x| (x, 0)).collect();
    for &s in s_perm {
        if s < n {
            group[u.color(s)] += 1;
        }
        if let Some(k) = mult.get_mut(&s) {
            *k += 1;
        }
    }

    let mut entries = vec![0usize; len];
    for i in (0..len).rev() {
        let s = s_perm[i];
        if s < n {
            group[u.color(s)] -= 1;
        }
        if let Some(k) = mult.get_mut(&s) {
            *k -= 1;
        }

        let deficient = (0..u.num_colors()).find(|&c| group[c] < beta * m.lower[c]);
        let pick = match deficient {
            Some(c0) => t_sorted
                .iter()
                .copied()
                .find(|&x| u.color(x) == c0 && mult[&x] < beta),
            None => t_sorted.iter().copied().find(|&x| {
                let c = u.color(x);
                group[c] < beta * t_per_color[c] && mult[&x] < beta
            }),
        };
        let x = pick.ok_or_else(|| {
            FairError::Invariant(format!("no admissible exchange element at position {i}"))
        })?;
        entries[i] = x;
        group[u.color(x)] += 1;
        *mult.get_mut(&x).expect("x in T") += 1;
    }
    Ok(ExchangeSequence { entries })
}

/// Checks that `e` holds exactly `β` copies of each element of `t` and no
/// other ids, and that every `S_i ∪ {e_{i+1}}` is independent in `M_β`.
pub fn verify_exchange(
    m: &FairnessMatroid,
    beta: usize,
    s_perm: &[usize],
    e: &[usize],
    t: &[usize],
) -> bool {
    let Ok(mb) = m.beta_extension(beta) else {
        return false;
    };
    if e.len() != s_perm.len() || e.len() != t.len() * beta {
        return false;
    }
    let mut mult: BTreeMap<usize, usize> = t.iter().map(|&x| (x, 0)).collect();
    for x in e {
        match mult.get_mut(x) {
            Some(k) => *k += 1,
            None => return false,
        }
    }
    if mult.values().any(|&k| k != beta) {
        return false;
    }

    let u = &m.universe;
    let n = u.len();
    let mut counts = vec![0usize; u.num_colors()];
    let mut prefix = std::collections::HashSet::new();
    for (i, &next) in e.iter().enumerate() {
        if next < n && !prefix.contains(&next) {
            counts[u.color(next)] += 1;
            let ok = mb.admits_counts(&counts);
            counts[u.color(next)] -= 1;
            if !ok {
                return false;
            }
        } else if !mb.admits_counts(&counts) {
            return false;
        }
        let s = s_perm[i];
        prefix.insert(s);
        if s < n {
            counts[u.color(s)] += 1;
        }
    }
    true
}

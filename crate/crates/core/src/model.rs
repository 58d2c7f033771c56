//! Ground set, color partition, fairness fractions and solutions.
//!
//! Elements are dense ids `0..n` and colors are dense ids `0..N`. Every
//! element carries exactly one color, so the color classes partition the
//! ground set.

use std::fmt;
use std::sync::Arc;

use crate::error::{FairError, Result};
use crate::oracle::SubmodularOracle;

#[derive(Debug, PartialEq, Eq)]
struct UniverseData {
    color_of: Vec<usize>,
    groups: Vec<Vec<usize>>,
}

/// A ground set `{0..n}` partitioned into color classes.
///
/// Cloning is cheap; the element-to-color table is shared.
#[derive(Clone, PartialEq, Eq)]
pub struct PartitionedUniverse {
    data: Arc<UniverseData>,
}

impl PartitionedUniverse {
    /// Builds a universe from a per-element color table. Colors must lie in
    /// `0..num_colors`; colors with no elements are allowed.
    pub fn new(color_of: Vec<usize>, num_colors: usize) -> Result<Self> {
        if num_colors == 0 {
            return Err(FairError::InvalidParameter(
                "at least one color is required".into(),
            ));
        }
        let mut groups = vec![Vec::new(); num_colors];
        for (e, &c) in color_of.iter().enumerate() {
            if c >= num_colors {
                return Err(FairError::InvalidParameter(format!(
                    "element {e} has color {c}, expected < {num_colors}"
                )));
            }
            groups[c].push(e);
        }
        Ok(Self {
            data: Arc::new(UniverseData { color_of, groups }),
        })
    }

    /// Builds a universe from explicit groups, which must be disjoint and
    /// cover `0..n` exactly.
    pub fn from_groups(groups: &[Vec<usize>]) -> Result<Self> {
        let n: usize = groups.iter().map(Vec::len).sum();
        let mut color_of = vec![usize::MAX; n];
        for (c, group) in groups.iter().enumerate() {
            for &e in group {
                if e >= n {
                    return Err(FairError::UnknownElement { element: e, size: n });
                }
                if color_of[e] != usize::MAX {
                    return Err(FairError::InvalidParameter(format!(
                        "element {e} appears in more than one group"
                    )));
                }
                color_of[e] = c;
            }
        }
        Self::new(color_of, groups.len())
    }

    pub fn len(&self) -> usize {
        self.data.color_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.color_of.is_empty()
    }

    pub fn num_colors(&self) -> usize {
        self.data.groups.len()
    }

    #[inline]
    pub fn color(&self, e: usize) -> usize {
        self.data.color_of[e]
    }

    pub fn colors(&self) -> &[usize] {
        &self.data.color_of
    }

    /// Elements of color `c` in increasing id order.
    pub fn group(&self, c: usize) -> &[usize] {
        &self.data.groups[c]
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.data.groups.iter().map(Vec::len).collect()
    }

    pub fn all_elements(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

impl fmt::Debug for PartitionedUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartitionedUniverse")
            .field("n", &self.len())
            .field("group_sizes", &self.group_sizes())
            .finish()
    }
}

/// A non-negative rational `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

/// Denominator used when converting floats to [`Ratio`].
pub const DEFAULT_DENOMINATOR: u64 = 1_000_000;

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(FairError::InvalidParameter("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    /// Rounds `value` to the nearest multiple of `1/den`.
    pub fn from_f64(value: f64, den: u64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(FairError::InvalidParameter(format!(
                "fraction {value} must be finite and non-negative"
            )));
        }
        Self::new((value * den as f64).round() as u64, den)
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Self { num: 1, den: 1 }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌊self · k⌋`
    pub fn floor_mul(&self, k: usize) -> usize {
        ((self.num as u128 * k as u128) / self.den as u128) as usize
    }

    /// `⌈self · k⌉`
    pub fn ceil_mul(&self, k: usize) -> usize {
        let p = self.num as u128 * k as u128;
        p.div_ceil(self.den as u128) as usize
    }

    /// `⌊self · k / d⌋`
    pub fn floor_mul_div(&self, k: usize, d: usize) -> usize {
        ((self.num as u128 * k as u128) / (self.den as u128 * d as u128)) as usize
    }

    /// `⌈self · k / d⌉`
    pub fn ceil_mul_div(&self, k: usize, d: usize) -> usize {
        (self.num as u128 * k as u128).div_ceil(self.den as u128 * d as u128) as usize
    }

    /// `self · k ≤ count`, exactly.
    pub fn mul_le(&self, k: usize, count: usize) -> bool {
        self.num as u128 * k as u128 <= self.den as u128 * count as u128
    }

    /// `count ≤ self · k`, exactly.
    pub fn mul_ge(&self, k: usize, count: usize) -> bool {
        self.den as u128 * count as u128 <= self.num as u128 * k as u128
    }

    fn cmp_ratio(&self, other: &Ratio) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp_ratio(other))
    }
}

/// Per-color proportion bounds `p_c |S| ≤ |S ∩ U_c| ≤ q_c |S|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessFractions {
    lower: Vec<Ratio>,
    upper: Vec<Ratio>,
}

impl FairnessFractions {
    /// Validates `0 ≤ p_c ≤ q_c ≤ 1`, `Σ p_c ≤ 1` and `Σ q_c ≥ 1`.
    pub fn new(lower: Vec<Ratio>, upper: Vec<Ratio>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(FairError::InvalidParameter(
                "lower and upper fractions must be non-empty and of equal length".into(),
            ));
        }
        for (c, (p, q)) in lower.iter().zip(&upper).enumerate() {
            if p > q || *q > Ratio::one() {
                return Err(FairError::InvalidParameter(format!(
                    "color {c}: need 0 <= p <= q <= 1, got p={}, q={}",
                    p.to_f64(),
                    q.to_f64()
                )));
            }
        }
        // Compare sums on a common denominator.
        let den: u128 = lower
            .iter()
            .chain(&upper)
            .fold(1u128, |acc, r| lcm(acc, r.den as u128));
        let scaled = |rs: &[Ratio]| -> u128 {
            rs.iter().map(|r| r.num as u128 * (den / r.den as u128)).sum()
        };
        if scaled(&lower) > den {
            return Err(FairError::InvalidParameter(
                "sum of lower fractions exceeds 1".into(),
            ));
        }
        if scaled(&upper) < den {
            return Err(FairError::InvalidParameter(
                "sum of upper fractions is below 1".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    pub fn from_f64(lower: &[f64], upper: &[f64]) -> Result<Self> {
        Self::from_f64_with_denominator(lower, upper, DEFAULT_DENOMINATOR)
    }

    pub fn from_f64_with_denominator(lower: &[f64], upper: &[f64], den: u64) -> Result<Self> {
        let conv = |v: &[f64]| -> Result<Vec<Ratio>> {
            v.iter().map(|&x| Ratio::from_f64(x, den)).collect()
        };
        Self::new(conv(lower)?, conv(upper)?)
    }

    /// The same bounds for every one of `num_colors` colors.
    pub fn uniform(num_colors: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::from_f64(&vec![lower; num_colors], &vec![upper; num_colors])
    }

    /// No fairness requirement: `p_c = 0`, `q_c = 1`.
    pub fn unconstrained(num_colors: usize) -> Self {
        Self {
            lower: vec![Ratio::zero(); num_colors],
            upper: vec![Ratio::one(); num_colors],
        }
    }

    pub fn num_colors(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self, c: usize) -> Ratio {
        self.lower[c]
    }

    pub fn upper(&self, c: usize) -> Ratio {
        self.upper[c]
    }

    /// `(⌊p κ⌋, ⌈q κ⌉)` per color.
    pub fn integer_bounds(&self, kappa: usize) -> (Vec<usize>, Vec<usize>) {
        (
            self.lower.iter().map(|p| p.floor_mul(kappa)).collect(),
            self.upper.iter().map(|q| q.ceil_mul(kappa)).collect(),
        )
    }

    /// Exact test of `p_c |S| ≤ count_c ≤ q_c |S|` for every color.
    pub fn proportions_hold(&self, counts: &[usize]) -> bool {
        let size: usize = counts.iter().sum();
        counts.iter().enumerate().all(|(c, &k)| {
            self.lower[c].mul_le(size, k) && self.upper[c].mul_ge(size, k)
        })
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

/// A subset of the ground set with cached per-color counts.
///
/// Insertion order is preserved; `elements()` returns members in the order
/// they were added.
#[derive(Clone)]
pub struct Solution {
    universe: PartitionedUniverse,
    present: Vec<bool>,
    order: Vec<usize>,
    counts: Vec<usize>,
}

impl Solution {
    pub fn empty(universe: &PartitionedUniverse) -> Self {
        Self {
            universe: universe.clone(),
            present: vec![false; universe.len()],
            order: Vec::new(),
            counts: vec![0; universe.num_colors()],
        }
    }

    /// Builds a solution from element ids; duplicates are ignored.
    pub fn from_elements<I>(universe: &PartitionedUniverse, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut s = Self::empty(universe);
        for e in elements {
            if e >= universe.len() {
                return Err(FairError::UnknownElement {
                    element: e,
                    size: universe.len(),
                });
            }
            s.insert(e);
        }
        Ok(s)
    }

    pub fn universe(&self) -> &PartitionedUniverse {
        &self.universe
    }

    /// Adds `e`; returns false if it was already a member.
    pub fn insert(&mut self, e: usize) -> bool {
        if self.present[e] {
            return false;
        }
        self.present[e] = true;
        self.order.push(e);
        self.counts[self.universe.color(e)] += 1;
        true
    }

    /// Removes `e`; returns false if it was not a member.
    pub fn remove(&mut self, e: usize) -> bool {
        if !self.present[e] {
            return false;
        }
        self.present[e] = false;
        let pos = self.order.iter().position(|&x| x == e).expect("member is in order list");
        self.order.remove(pos);
        self.counts[self.universe.color(e)] -= 1;
        true
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        self.present.get(e).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn count(&self, c: usize) -> usize {
        self.counts[c]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn elements(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }

    /// Recounts colors from scratch; used to check the cache.
    pub fn recount(&self) -> Vec<usize> {
        let mut counts = vec![0; self.universe.num_colors()];
        for (e, &p) in self.present.iter().enumerate() {
            if p {
                counts[self.universe.color(e)] += 1;
            }
        }
        counts
    }
}

impl PartialEq for Solution {
    fn eq(&self, other: &Self) -> bool {
        self.present == other.present
    }
}

impl Eq for Solution {}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solution")
            .field("members", &self.sorted())
            .field("counts", &self.counts)
            .finish()
    }
}

/// `(max_c |S ∩ U_c| − min_c |S ∩ U_c|) / |S|`, including empty colors.
pub fn fairness_difference(solution: &Solution) -> Result<f64> {
    fairness_difference_counts(solution.counts())
}

pub fn fairness_difference_counts(counts: &[usize]) -> Result<f64> {
    let size: usize = counts.iter().sum();
    if size == 0 {
        return Err(FairError::EmptySolution);
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let min = counts.iter().copied().min().unwrap_or(0);
    Ok((max - min) as f64 / size as f64)
}

/// A fair submodular cover instance.
pub struct FscInstance<O> {
    pub universe: PartitionedUniverse,
    pub fractions: FairnessFractions,
    pub tau: f64,
    pub oracle: O,
}

impl<O: SubmodularOracle> FscInstance<O> {
    /// Validates shapes and `0 ≤ τ ≤ f(U)`.
    pub fn new(
        universe: PartitionedUniverse,
        fractions: FairnessFractions,
        tau: f64,
        oracle: O,
    ) -> Result<Self> {
        if fractions.num_colors() != universe.num_colors() {
            return Err(FairError::InvalidParameter(format!(
                "{} fraction pairs for {} colors",
                fractions.num_colors(),
                universe.num_colors()
            )));
        }
        if oracle.ground_size() != universe.len() {
            return Err(FairError::InvalidParameter(format!(
                "oracle ground set has {} elements, universe has {}",
                oracle.ground_size(),
                universe.len()
            )));
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(FairError::InvalidParameter(format!("tau = {tau}")));
        }
        let max = oracle.evaluate(&universe.all_elements());
        if tau > max {
            return Err(FairError::TauInfeasible { tau, max });
        }
        Ok(Self {
            universe,
            fractions,
            tau,
            oracle,
        })
    }

    /// True iff `p_c|S| ≤ |S ∩ U_c| ≤ q_c|S|` for all colors and `f(S) ≥ τ`.
    pub fn is_feasible(&self, solution: &Solution) -> bool {
        self.fractions.proportions_hold(solution.counts())
            && self.oracle.evaluate(solution.elements()) >= self.tau
    }
}

/// Free-function form of [`FscInstance::is_feasible`].
pub fn fsc_feasible<O: SubmodularOracle>(instance: &FscInstance<O>, solution: &Solution) -> bool {
    instance.is_feasible(solution)
}

/// The relaxed per-color guarantee of the converters:
/// `β⌊p_c|S|/β⌋ ≤ |S ∩ U_c| ≤ β⌈q_c|S|/β⌉`.
pub fn relaxed_fairness(counts: &[usize], beta: usize, fractions: &FairnessFractions) -> Vec<bool> {
    let size: usize = counts.iter().sum();
    counts
        .iter()
        .enumerate()
        .map(|(c, &k)| {
            let lo = beta * fractions.lower(c).floor_mul_div(size, beta);
            let hi = beta * fractions.upper(c).ceil_mul_div(size, beta);
            lo <= k && k <= hi
        })
        .collect()
}

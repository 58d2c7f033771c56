//! Brute-force reference computations shared by the integration tests.
//! Nothing here calls into the library's own evaluation or membership
//! logic; sets are bitmasks over at most 16 elements.

#![allow(dead_code)]

use fairsub::{FairnessFractions, PartitionedUniverse, Ratio, TagCoverOracle};
use rand::seq::SliceRandom;
use rand::Rng;

/// A small tagged instance with its raw data kept alongside.
#[derive(Clone, Debug)]
pub struct SmallInstance {
    pub n: usize,
    pub colors: Vec<usize>,
    pub num_colors: usize,
    pub tags: Vec<Vec<u32>>,
    /// `(numerator, denominator)` per color.
    pub lower: Vec<(u64, u64)>,
    pub upper: Vec<(u64, u64)>,
}

impl SmallInstance {
    pub fn universe(&self) -> PartitionedUniverse {
        PartitionedUniverse::new(self.colors.clone(), self.num_colors).unwrap()
    }

    pub fn oracle(&self) -> TagCoverOracle {
        TagCoverOracle::new(self.tags.clone())
    }

    pub fn fractions(&self) -> FairnessFractions {
        let r = |v: &[(u64, u64)]| v.iter().map(|&(a, b)| Ratio::new(a, b).unwrap()).collect();
        FairnessFractions::new(r(&self.lower), r(&self.upper)).unwrap()
    }

    pub fn value(&self, mask: u32) -> f64 {
        let mut seen = 0u64;
        for e in bits(mask) {
            for &t in &self.tags[e] {
                seen |= 1 << t;
            }
        }
        seen.count_ones() as f64
    }

    pub fn counts(&self, mask: u32) -> Vec<usize> {
        let mut c = vec![0; self.num_colors];
        for e in bits(mask) {
            c[self.colors[e]] += 1;
        }
        c
    }

    /// `p_c |S| ≤ |S ∩ U_c| ≤ q_c |S|`, exactly.
    pub fn proportional(&self, counts: &[usize]) -> bool {
        let size: u64 = counts.iter().sum::<usize>() as u64;
        counts.iter().enumerate().all(|(c, &k)| {
            let (pn, pd) = self.lower[c];
            let (qn, qd) = self.upper[c];
            pn * size <= k as u64 * pd && k as u64 * qd <= qn * size
        })
    }

    /// `(⌊p κ⌋, ⌈q κ⌉)`.
    pub fn floor_ceil_bounds(&self, kappa: usize) -> (Vec<usize>, Vec<usize>) {
        let k = kappa as u64;
        (
            self.lower.iter().map(|&(a, b)| (a * k / b) as usize).collect(),
            self.upper.iter().map(|&(a, b)| (a * k).div_ceil(b) as usize).collect(),
        )
    }

    /// `(⌈p κ⌉, ⌈q κ⌉)`.
    pub fn ceil_ceil_bounds(&self, kappa: usize) -> (Vec<usize>, Vec<usize>) {
        let k = kappa as u64;
        (
            self.lower.iter().map(|&(a, b)| (a * k).div_ceil(b) as usize).collect(),
            self.upper.iter().map(|&(a, b)| (a * k).div_ceil(b) as usize).collect(),
        )
    }

    /// `β⌊p_c|S|/β⌋ ≤ |S ∩ U_c| ≤ β⌈q_c|S|/β⌉` for every color.
    pub fn relaxed_fair(&self, counts: &[usize], beta: usize) -> bool {
        let size = counts.iter().sum::<usize>() as u64;
        let b = beta as u64;
        counts.iter().enumerate().all(|(c, &k)| {
            let (pn, pd) = self.lower[c];
            let (qn, qd) = self.upper[c];
            let lo = b * (pn * size / (pd * b));
            let hi = b * (qn * size).div_ceil(qd * b);
            lo <= k as u64 && k as u64 <= hi
        })
    }

    pub fn max_singleton(&self) -> f64 {
        (0..self.n).map(|e| self.value(1 << e)).fold(0.0, f64::max)
    }

    /// Exact `E f(R(x))` by enumerating every outcome.
    pub fn multilinear(&self, x: &[f64]) -> f64 {
        (0..1u32 << self.n).map(|m| prob(x, m) * self.value(m)).sum()
    }

    /// Exact `E Δf(R(y), u)`.
    pub fn expected_marginal(&self, y: &[f64], u: usize) -> f64 {
        (0..1u32 << self.n)
            .filter(|m| m & (1 << u) == 0)
            .map(|m| prob(y, m) * (self.value(m | (1 << u)) - self.value(m)))
            .sum()
    }

    /// Largest `f` over sets whose color counts satisfy `admits`.
    pub fn best_value(&self, admits: impl Fn(&[usize]) -> bool) -> f64 {
        (0..1u32 << self.n)
            .filter(|&m| admits(&self.counts(m)))
            .map(|m| self.value(m))
            .fold(0.0, f64::max)
    }
}

fn prob(x: &[f64], mask: u32) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, &p)| if mask & (1 << i) != 0 { p } else { 1.0 - p })
        .product()
}

pub fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

pub fn mask_of(set: &[usize]) -> u32 {
    set.iter().fold(0, |m, &e| m | (1 << e))
}

/// Fairness-matroid membership from the definition.
pub fn in_matroid(counts: &[usize], kappa: usize, lower: &[usize], upper: &[usize]) -> bool {
    counts.iter().zip(upper).all(|(k, u)| k <= u)
        && counts.iter().zip(lower).map(|(&k, &l)| k.max(l)).sum::<usize>() <= kappa
}

/// Largest independent-set size, by enumeration over count vectors.
pub fn matroid_rank(group_sizes: &[usize], kappa: usize, lower: &[usize], upper: &[usize]) -> usize {
    fn go(c: usize, g: &[usize], k: usize, l: &[usize], u: &[usize], acc: &mut Vec<usize>) -> usize {
        if c == g.len() {
            return if in_matroid(acc, k, l, u) { acc.iter().sum() } else { 0 };
        }
        let mut best = 0;
        for x in 0..=g[c] {
            acc.push(x);
            best = best.max(go(c + 1, g, k, l, u, acc));
            acc.pop();
        }
        best
    }
    go(0, group_sizes, kappa, lower, upper, &mut Vec::new())
}

/// Random tagged instance: `n` elements, every color non-empty, each element
/// carrying one to three tags, and fractions with `0 < p_c ≤ q_c < 1`,
/// `Σ p ≤ 1 ≤ Σ q`.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, num_colors: usize) -> SmallInstance {
    assert!(n >= num_colors && num_colors >= 2);
    let mut colors: Vec<usize> = (0..num_colors).collect();
    colors.extend((num_colors..n).map(|_| rng.gen_range(0..num_colors)));
    colors.shuffle(rng);
    let vocab: u32 = rng.gen_range(4..=12);
    let tags = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=3usize);
            let mut t: Vec<u32> = (0..vocab).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
            t.sort_unstable();
            t
        })
        .collect();
    let den: u64 = *[4u64, 5, 6, 10].choose(rng).unwrap();
    let (lower, upper) = loop {
        let lower: Vec<u64> = (0..num_colors)
            .map(|_| rng.gen_range(1..=den / num_colors as u64))
            .collect();
        let upper: Vec<u64> = lower.iter().map(|&p| rng.gen_range(p..den)).collect();
        if upper.iter().sum::<u64>() >= den {
            break (lower, upper);
        }
    };
    SmallInstance {
        n,
        colors,
        num_colors,
        tags,
        lower: lower.into_iter().map(|p| (p, den)).collect(),
        upper: upper.into_iter().map(|q| (q, den)).collect(),
    }
}

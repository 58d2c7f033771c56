//! Continuous threshold greedy over the multilinear extension
//! `F(x) = E f(S(x))`, with Monte-Carlo estimates and swap rounding.
//!
//! A [`FractionalSolution`] always carries the weighted sets it was built
//! from, which doubles as a certificate of polytope membership and is what
//! [`swap_round`] consumes.

use rand::Rng;

use crate::discrete::beta_for_epsilon;
use crate::error::{FairError, Result};
use crate::matroid::{FairnessMatroid, IndependentSet};
use crate::oracle::SubmodularOracle;
use crate::rng::sample_mean;

/// Slack used when comparing accumulated float weights against 1.
pub const COORD_TOL: f64 = 1e-9;

/// `x = Σ_t ε_t · 1_{B_t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    x: Vec<f64>,
    bases: Vec<(f64, Vec<usize>)>,
}

impl FractionalSolution {
    pub fn zero(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            bases: Vec::new(),
        }
    }

    /// Builds `x` from weighted sets, rejecting coordinates above 1.
    pub fn from_bases(n: usize, bases: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let mut sol = Self::zero(n);
        for (w, b) in bases {
            sol.push(w, b)?;
        }
        Ok(sol)
    }

    /// A fractional point without a decomposition; it cannot be rounded.
    pub fn without_certificate(x: Vec<f64>) -> Self {
        Self { x, bases: Vec::new() }
    }

    /// `x ← x + w · 1_B`.
    pub fn push(&mut self, weight: f64, mut set: Vec<usize>) -> Result<()> {
        if !(weight > 0.0) {
            return Err(FairError::InvalidParameter(format!("step weight {weight}")));
        }
        set.sort_unstable();
        set.dedup();
        for &i in &set {
            if i >= self.x.len() {
                return Err(FairError::UnknownElement {
                    element: i,
                    size: self.x.len(),
                });
            }
            let v = self.x[i] + weight;
            if v > 1.0 + COORD_TOL {
                return Err(FairError::CoordinateOverflow { index: i, value: v });
            }
        }
        for &i in &set {
            self.x[i] += weight;
        }
        self.bases.push((weight, set));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    pub fn bases(&self) -> &[(f64, Vec<usize>)] {
        &self.bases
    }

    pub fn has_certificate(&self) -> bool {
        !self.bases.is_empty()
    }

    /// Recomputes `Σ ε_t 1_{B_t}` in insertion order.
    pub fn recompute(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.x.len()];
        for (w, b) in &self.bases {
            for &i in b {
                x[i] += w;
            }
        }
        x
    }

    /// True when `x` is integral (every coordinate 0 or 1).
    pub fn is_integral(&self) -> bool {
        self.x.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

/// Monte-Carlo budget for marginal estimates inside the subroutine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePlan {
    pub per_estimate_samples: usize,
    pub rng_seed: u64,
    /// Divisor applied to the sample count (≥ 1).
    pub scale: f64,
}

impl SamplePlan {
    pub fn for_instance(n: usize, kappa: usize, epsilon: f64, seed: u64, scale: f64) -> Self {
        Self {
            per_estimate_samples: sample_count_subroutine(n, kappa, epsilon, scale),
            rng_seed: seed,
            scale,
        }
    }

    pub fn fixed(samples: usize, seed: u64) -> Self {
        Self {
            per_estimate_samples: samples.max(1),
            rng_seed: seed,
            scale: 1.0,
        }
    }
}

fn ceil_scaled(raw: f64, scale: f64) -> usize {
    let scale = if scale >= 1.0 { scale } else { 1.0 };
    ((raw / scale) - 1e-9).ceil().max(1.0) as usize
}

/// `⌈(3κ/ε²) ln(4n⁴/ε³) / scale⌉`, at least 1.
pub fn sample_count_subroutine(n: usize, kappa: usize, epsilon: f64, scale: f64) -> usize {
    let n = n as f64;
    let raw = 3.0 * kappa as f64 / (epsilon * epsilon) * (4.0 * n.powi(4) / epsilon.powi(3)).ln();
    ceil_scaled(raw, scale)
}

/// `⌈(18n/ε²) ln(4n/δ) / scale⌉`, at least 1.
pub fn sample_count_gate(n: usize, epsilon: f64, delta: f64, scale: f64) -> usize {
    let nf = n as f64;
    let raw = 18.0 * nf / (epsilon * epsilon) * (4.0 * nf / delta).ln();
    ceil_scaled(raw, scale)
}

/// Hands out estimate indices so that every estimate uses its own streams.
#[derive(Debug, Clone)]
pub struct EstimateStream {
    seed: u64,
    next: u64,
}

impl EstimateStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, next: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn take(&mut self) -> u64 {
        let i = self.next;
        self.next += 1;
        i
    }
}

fn sample_set<R: Rng>(y: &[f64], rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    for (i, &p) in y.iter().enumerate() {
        if p >= 1.0 || (p > 0.0 && rng.gen::<f64>() < p) {
            out.push(i);
        }
    }
}

/// Mean of `f(S(x))` over `samples` draws.
pub fn estimate_f<O: SubmodularOracle>(
    x: &FractionalSolution,
    oracle: &O,
    samples: usize,
    stream: &mut EstimateStream,
) -> f64 {
    let y = x.coords();
    let est = stream.take();
    sample_mean(stream.seed, est, samples.max(1), |rng| {
        let mut set = Vec::new();
        sample_set(y, rng, &mut set);
        oracle.evaluate(&set)
    })
}

/// Mean of `Δf(S(x + ε·1_B), u)` over `samples` draws; zero on draws that
/// already contain `u`.
pub fn estimate_marginal<O: SubmodularOracle>(
    x: &FractionalSolution,
    b: &[usize],
    u: usize,
    epsilon: f64,
    oracle: &O,
    samples: usize,
    stream: &mut EstimateStream,
) -> Result<f64> {
    let mut y = x.coords().to_vec();
    for &i in b {
        y[i] += epsilon;
        if y[i] > 1.0 + COORD_TOL {
            return Err(FairError::CoordinateOverflow { index: i, value: y[i] });
        }
    }
    if u >= y.len() {
        return Err(FairError::UnknownElement {
            element: u,
            size: y.len(),
        });
    }
    Ok(marginal_at(&y, u, oracle, samples, stream))
}

fn marginal_at<O: SubmodularOracle>(
    y: &[f64],
    u: usize,
    oracle: &O,
    samples: usize,
    stream: &mut EstimateStream,
) -> f64 {
    let est = stream.take();
    sample_mean(stream.seed, est, samples.max(1), |rng| {
        let mut set = Vec::new();
        sample_set(y, rng, &mut set);
        if set.binary_search(&u).is_ok() {
            return 0.0;
        }
        let mut state = oracle.empty_state();
        for &e in &set {
            oracle.insert(&mut state, e);
        }
        oracle.gain(&state, u)
    })
}

/// `⌈ln(1/ε) + 1⌉`.
pub fn beta_continuous(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(FairError::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    Ok(((1.0 / epsilon).ln() + 1.0 - 1e-9).ceil().max(1.0) as usize)
}

/// `max f({x})` over singletons independent in `m`.
pub fn max_singleton<O: SubmodularOracle>(oracle: &O, m: &FairnessMatroid) -> f64 {
    let set = IndependentSet::new(m);
    let state = oracle.empty_state();
    (0..oracle.ground_size())
        .filter(|&x| set.can_add(x))
        .map(|x| oracle.gain(&state, x))
        .fold(0.0, f64::max)
}

/// One call of the decreasing-threshold subroutine. `m` is the base
/// matroid; candidates are tested against its `⌈ln(1/ε)+1⌉`-extension.
/// Elements flagged in `excluded` are never considered.
#[allow(clippy::too_many_arguments)]
pub fn decreasing_threshold<O: SubmodularOracle>(
    x: &FractionalSolution,
    oracle: &O,
    m: &FairnessMatroid,
    epsilon: f64,
    d: f64,
    plan: &SamplePlan,
    excluded: &[bool],
    stream: &mut EstimateStream,
) -> Result<Vec<usize>> {
    let beta = beta_continuous(epsilon)?;
    let mb = m.beta_extension(beta)?;
    let n = oracle.ground_size();
    let mut set = IndependentSet::new(&mb);
    let mut y = x.coords().to_vec();
    let cutoff = epsilon * d / m.kappa() as f64;
    let mut w = d;
    while w > cutoff {
        for u in 0..n {
            if excluded.get(u).copied().unwrap_or(false) || !set.can_add(u) {
                continue;
            }
            let est = marginal_at(&y, u, oracle, plan.per_estimate_samples, stream);
            if est >= w {
                set.try_insert(u);
                y[u] += epsilon;
                if y[u] > 1.0 + COORD_TOL {
                    return Err(FairError::CoordinateOverflow { index: u, value: y[u] });
                }
            }
        }
        w *= 1.0 - epsilon;
    }
    Ok(set.into_solution().sorted())
}

/// Output of [`continuous_threshold_greedy`].
#[derive(Debug, Clone)]
pub struct CtgResult {
    pub x: FractionalSolution,
    /// `⌈ln(1/ε)+1⌉`; every base lies in `M_beta`.
    pub beta: usize,
    pub d: f64,
    pub estimates: u64,
}

/// `⌈1/ε⌉` steps of size `ε` along directions from
/// [`decreasing_threshold`]. Coordinates that cannot take another step
/// without exceeding 1 are excluded from later steps.
///
/// `delta` is accepted for interface parity with the converter and plays
/// no role here: the per-estimate sample count in `plan` already fixes the
/// failure probability.
pub fn continuous_threshold_greedy<O: SubmodularOracle>(
    oracle: &O,
    m: &FairnessMatroid,
    epsilon: f64,
    _delta: f64,
    plan: &SamplePlan,
) -> Result<CtgResult> {
    if oracle.ground_size() != m.universe().len() {
        return Err(FairError::InvalidParameter(
            "oracle and matroid ground sets differ".into(),
        ));
    }
    let steps = beta_for_epsilon(epsilon)?;
    let beta = beta_continuous(epsilon)?;
    let n = oracle.ground_size();
    let d = max_singleton(oracle, m);
    let mut x = FractionalSolution::zero(n);
    let mut stream = EstimateStream::new(plan.rng_seed);
    let mut steps_taken = vec![0usize; n];
    for _ in 0..steps {
        let excluded: Vec<bool> = steps_taken
            .iter()
            .map(|&k| (k + 1) as f64 * epsilon > 1.0 + COORD_TOL)
            .collect();
        let b = decreasing_threshold(&x, oracle, m, epsilon, d, plan, &excluded, &mut stream)?;
        for &i in &b {
            steps_taken[i] += 1;
        }
        x.push(epsilon, b)?;
    }
    Ok(CtgResult {
        x,
        beta,
        d,
        estimates: stream.next,
    })
}

/// Membership in the padded matroid: the real part must be independent in
/// `m`; dummy ids `≥ n` are free.
fn padded_member(m: &FairnessMatroid, set: &[usize]) -> bool {
    let u = m.universe();
    let mut counts = vec![0usize; u.num_colors()];
    for &e in set.iter().filter(|&&e| e < u.len()) {
        counts[u.color(e)] += 1;
    }
    m.admits_counts(&counts)
}

fn pad(set: &[usize], n: usize, rank: usize) -> Result<Vec<usize>> {
    if set.len() > rank {
        return Err(FairError::Precondition(format!(
            "set of size {} exceeds rank {rank}",
            set.len()
        )));
    }
    let mut out = set.to_vec();
    out.extend(n..n + (rank - set.len()));
    out.sort_unstable();
    Ok(out)
}

fn merge_bases<R: Rng + ?Sized>(
    m: &FairnessMatroid,
    mut c: Vec<usize>,
    wc: f64,
    mut b: Vec<usize>,
    wb: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    loop {
        let Some(&i) = c.iter().find(|e| b.binary_search(e).is_err()) else {
            return Ok(c);
        };
        let mut exchange = None;
        for &j in b.iter().filter(|e| c.binary_search(e).is_err()) {
            let mut b2 = b.clone();
            b2.retain(|&e| e != j);
            b2.push(i);
            let mut c2 = c.clone();
            c2.retain(|&e| e != i);
            c2.push(j);
            if padded_member(m, &b2) && padded_member(m, &c2) {
                b2.sort_unstable();
                c2.sort_unstable();
                exchange = Some((b2, c2));
                break;
            }
        }
        let (b2, c2) = exchange.ok_or_else(|| {
            FairError::Invariant(format!("no strong exchange partner for element {i}"))
        })?;
        if rng.gen::<f64>() < wc / (wc + wb) {
            b = b2;
        } else {
            c = c2;
        }
    }
}

/// Swap rounding over the base decomposition of `x` in the matroid
/// `m_beta`. Each set is padded with dummy elements up to the matroid's
/// nominal rank so all sets are bases; weights are normalized to sum to 1.
pub fn swap_round<R: Rng + ?Sized>(
    x: &FractionalSolution,
    m_beta: &FairnessMatroid,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if !x.has_certificate() {
        return Err(FairError::MissingCertificate);
    }
    let n = m_beta.universe().len();
    let rank = m_beta.kappa();
    for (_, b) in x.bases() {
        if !padded_member(m_beta, b) {
            return Err(FairError::Precondition(
                "a certificate set is not independent".into(),
            ));
        }
    }
    let total: f64 = x.bases().iter().map(|(w, _)| w).sum();
    let mut iter = x.bases().iter();
    let (w0, b0) = iter.next().expect("certificate is non-empty");
    let mut c = pad(b0, n, rank)?;
    let mut wc = w0 / total;
    for (w, b) in iter {
        let wb = w / total;
        c = merge_bases(m_beta, c, wc, pad(b, n, rank)?, wb, rng)?;
        wc += wb;
    }
    c.retain(|&e| e < n);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PartitionedUniverse;
    use crate::oracle::{CountingOracle, TagCoverOracle};
    use crate::rng::seeded;

    fn t1() -> (PartitionedUniverse, TagCoverOracle) {
        let u = PartitionedUniverse::from_groups(&[vec![0, 1], vec![2, 3]]).unwrap();
        let o = TagCoverOracle::from_named(&[
            vec!["A"],
            vec!["A", "B"],
            vec!["C"],
            vec!["C", "D"],
        ]);
        (u, o)
    }

    /// Exact `F(x)` by enumerating all subsets.
    fn exact_f<O: SubmodularOracle>(o: &O, x: &[f64]) -> f64 {
        let n = x.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let mut p = 1.0;
            let mut set = Vec::new();
            for (i, &xi) in x.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p *= xi;
                    set.push(i);
                } else {
                    p *= 1.0 - xi;
                }
            }
            if p > 0.0 {
                total += p * o.evaluate(&set);
            }
        }
        total
    }

    #[test]
    fn sample_count_examples() {
        assert_eq!(sample_count_subroutine(4, 2, 0.5, 1.0), 217);
        assert_eq!(sample_count_subroutine(4, 2, 0.5, 217.0), 1);
        // 6·ln(4·4⁴) = 6·ln 1024
        assert_eq!(sample_count_subroutine(4, 2, 1.0, 1.0), 42);
        assert_eq!(sample_count_gate(4, 0.5, 0.1, 1.0), 1462);
        assert_eq!(sample_count_gate(4, 0.5, 0.1, 1e9), 1);
        let big = sample_count_gate(5000, 0.1, 0.01, 1.0) as f64;
        assert!((big / 1.306e8 - 1.0).abs() < 1e-3, "{big}");
    }

    #[test]
    fn sample_count_monotonicity() {
        let base = sample_count_subroutine(50, 4, 0.2, 1.0);
        assert!(sample_count_subroutine(50, 4, 0.3, 1.0) <= base);
        assert!(sample_count_subroutine(50, 4, 0.2, 3.0) <= base);
        assert!(sample_count_subroutine(60, 4, 0.2, 1.0) >= base);
        assert!(sample_count_subroutine(50, 5, 0.2, 1.0) >= base);
    }

    #[test]
    fn estimate_f_examples() {
        let (_, o) = t1();
        let full = FractionalSolution::from_bases(4, vec![(1.0, vec![0, 1, 2, 3])]).unwrap();
        let mut s = EstimateStream::new(1);
        assert_eq!(estimate_f(&full, &o, 3, &mut s), 4.0);
        assert_eq!(estimate_f(&FractionalSolution::zero(4), &o, 3, &mut s), 0.0);
        let half = FractionalSolution::from_bases(4, vec![(0.5, vec![0])]).unwrap();
        assert_eq!(exact_f(&o, half.coords()), 0.5);
        let est = estimate_f(&half, &o, 20_000, &mut s);
        assert!((est - 0.5).abs() < 0.02, "{est}");
    }

    #[test]
    fn estimate_marginal_examples() {
        let (_, o) = t1();
        let mut s = EstimateStream::new(2);
        let zero = FractionalSolution::zero(4);
        assert_eq!(estimate_marginal(&zero, &[], 1, 0.3, &o, 5, &mut s).unwrap(), 2.0);
        let full = FractionalSolution::from_bases(4, vec![(1.0, vec![0, 1, 2, 3])]).unwrap();
        assert_eq!(estimate_marginal(&full, &[], 1, 0.3, &o, 5, &mut s).unwrap(), 0.0);
        assert!(matches!(
            estimate_marginal(&full, &[2], 1, 0.3, &o, 5, &mut s),
            Err(FairError::CoordinateOverflow { index: 2, .. })
        ));
    }

    #[test]
    fn estimates_are_seed_reproducible() {
        let (_, o) = t1();
        let x = FractionalSolution::from_bases(4, vec![(0.3, vec![0, 2]), (0.4, vec![1, 2])]).unwrap();
        let a = estimate_f(&x, &o, 2000, &mut EstimateStream::new(9));
        let b = estimate_f(&x, &o, 2000, &mut EstimateStream::new(9));
        assert_eq!(a, b);
    }

    #[test]
    fn estimator_is_unbiased() {
        let (_, o) = t1();
        let x = FractionalSolution::from_bases(4, vec![(0.3, vec![0, 2]), (0.4, vec![1, 3])]).unwrap();
        let exact = exact_f(&o, x.coords());
        let reps = 2000;
        let vals: Vec<f64> = (0..reps)
            .map(|s| estimate_f(&x, &o, 1, &mut EstimateStream::new(s)))
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se, "mean {mean} exact {exact} se {se}");
    }

    #[test]
    fn decreasing_threshold_first_pass() {
        let (u, o) = t1();
        let m = FairnessMatroid::new(u, 2, vec![0, 0], vec![2, 2]).unwrap();
        let plan = SamplePlan::fixed(4, 0);
        let x = FractionalSolution::zero(4);
        let mut s = EstimateStream::new(0);
        let b = decreasing_threshold(&x, &o, &m, 0.5, 2.0, &plan, &[false; 4], &mut s).unwrap();
        assert!(b.contains(&1) && b.contains(&3));
        assert!(m.beta_extension(2).unwrap().admits_counts(&[
            b.iter().filter(|&&e| e < 2).count(),
            b.iter().filter(|&&e| e >= 2).count()
        ]));
    }

    #[test]
    fn single_element_universe() {
        let u = PartitionedUniverse::from_groups(&[vec![0]]).unwrap();
        let o = TagCoverOracle::from_named(&[vec!["x"]]);
        let m = FairnessMatroid::new(u, 1, vec![0], vec![1]).unwrap();
        let mut s = EstimateStream::new(0);
        let b = decreasing_threshold(
            &FractionalSolution::zero(1), &o, &m, 0.5, 1.0, &SamplePlan::fixed(3, 0), &[false], &mut s,
        )
        .unwrap();
        assert_eq!(b, vec![0]);
    }

    #[test]
    fn ctg_single_step() {
        let (u, o) = t1();
        let m = FairnessMatroid::new(u, 2, vec![0, 0], vec![1, 1]).unwrap();
        let r = continuous_threshold_greedy(&o, &m, 1.0, 0.1, &SamplePlan::fixed(8, 3)).unwrap();
        assert_eq!(r.x.bases().len(), 1);
        assert!(r.x.is_integral());
        assert_eq!(r.beta, 1);
    }

    #[test]
    fn ctg_certificate_and_membership() {
        let (u, o) = t1();
        let m = FairnessMatroid::new(u, 2, vec![0, 0], vec![2, 2]).unwrap();
        for seed in 0..20 {
            let plan = SamplePlan::for_instance(4, 2, 0.5, seed, 4.0);
            let c = CountingOracle::new(&o);
            let r = continuous_threshold_greedy(&c, &m, 0.5, 0.1, &plan).unwrap();
            assert_eq!(r.x.recompute(), r.x.coords());
            let mb = m.beta_extension(r.beta).unwrap();
            for (_, b) in r.x.bases() {
                assert!(padded_member(&mb, b));
            }
            assert!(r.x.coords().iter().all(|&v| (0.0..=1.0).contains(&v)));
            // F grows along the prefix sums of the certificate.
            let mut prefix = FractionalSolution::zero(4);
            let mut last = 0.0;
            for (w, b) in r.x.bases() {
                prefix.push(*w, b.clone()).unwrap();
                let v = exact_f(&o, prefix.coords());
                assert!(v >= last - 1e-12);
                last = v;
            }
            let s = swap_round(&r.x, &mb, &mut seeded(seed)).unwrap();
            assert!(padded_member(&mb, &s));
        }
    }

    #[test]
    fn saturation_keeps_coordinates_in_cube() {
        let (u, o) = t1();
        let m = FairnessMatroid::new(u, 2, vec![0, 0], vec![2, 2]).unwrap();
        let r = continuous_threshold_greedy(&o, &m, 0.3, 0.1, &SamplePlan::fixed(16, 1)).unwrap();
        assert_eq!(r.x.bases().len(), 4);
        assert!(r.x.coords().iter().all(|&v| v <= 1.0 + COORD_TOL));
    }

    #[test]
    fn swap_round_integral_identity() {
        let (u, _) = t1();
        let m = FairnessMatroid::new(u, 2, vec![0, 0], vec![1, 1]).unwrap();
        let x = FractionalSolution::from_bases(4, vec![(1.0, vec![1, 3])]).unwrap();
        assert_eq!(swap_round(&x, &m, &mut seeded(0)).unwrap(), vec![1, 3]);
    }

    #[test]
    fn swap_round_requires_certificate() {
        let (u, _) = t1();
        let m = FairnessMatroid::new(u, 2, vec![0, 0], vec![1, 1]).unwrap();
        let x = FractionalSolution::without_certificate(vec![0.5; 4]);
        assert!(matches!(swap_round(&x, &m, &mut seeded(0)), Err(FairError::MissingCertificate)));
    }

    #[test]
    fn swap_round_is_fair_coin_on_two_bases() {
        let u = PartitionedUniverse::from_groups(&[vec![0, 1]]).unwrap();
        let m = FairnessMatroid::new(u, 1, vec![0], vec![2]).unwrap();
        let x = FractionalSolution::from_bases(2, vec![(0.5, vec![0]), (0.5, vec![1])]).unwrap();
        let mut rng = seeded(11);
        let trials = 10_000;
        let zeros = (0..trials)
            .filter(|_| swap_round(&x, &m, &mut rng).unwrap() == vec![0])
            .count();
        let share = zeros as f64 / trials as f64;
        assert!((share - 0.5).abs() <= 0.05, "{share}");
    }

    #[test]
    fn swap_round_mean_dominates_f() {
        let (u, o) = t1();
        let m = FairnessMatroid::new(u, 2, vec![0, 0], vec![2, 2]).unwrap();
        let x = FractionalSolution::from_bases(
            4,
            vec![(0.25, vec![0, 2]), (0.25, vec![1, 3]), (0.5, vec![0, 3])],
        )
        .unwrap();
        let exact = exact_f(&o, x.coords());
        let mut rng = seeded(5);
        let vals: Vec<f64> = (0..1000)
            .map(|_| o.evaluate(&swap_round(&x, &m, &mut rng).unwrap()))
            .collect();
        let mean = vals.iter().sum::<f64>() / 1000.0;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 999.0).sqrt();
        assert!(mean >= exact - 3.0 * sd / 1000f64.sqrt(), "mean {mean} exact {exact}");
    }
}

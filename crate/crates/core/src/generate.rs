//! Seeded synthetic instance generators.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FairError, Result};
use crate::model::PartitionedUniverse;
use crate::oracle::{CoverageOracle, TagCoverOracle};

/// Group sizes for `n` elements in `groups` colors: color 0 receives
/// `⌊skew · n⌋` elements and the rest is split as evenly as possible, lower
/// color ids taking the remainder.
pub fn skewed_quota(n: usize, groups: usize, skew: f64) -> Result<Vec<usize>> {
    if groups == 0 || n < groups {
        return Err(FairError::InvalidParameter(format!(
            "need n >= N >= 1, got n={n}, N={groups}"
        )));
    }
    if !(skew > 0.0 && skew <= 1.0) {
        return Err(FairError::InvalidParameter(format!(
            "skew must be in (0, 1], got {skew}"
        )));
    }
    if groups == 1 {
        return Ok(vec![n]);
    }
    let major = (skew * n as f64).floor() as usize;
    let rest = n - major;
    if major == 0 || rest < groups - 1 {
        return Err(FairError::InvalidParameter(format!(
            "skew {skew} leaves some color of n={n}, N={groups} empty"
        )));
    }
    let minor = groups - 1;
    let mut sizes = vec![major];
    sizes.extend((0..minor).map(|i| rest / minor + usize::from(i < rest % minor)));
    Ok(sizes)
}

/// Erdős–Rényi graph with expected degree `degree` whose color classes
/// follow [`skewed_quota`]. Colors are assigned to a seeded random
/// permutation of the vertices.
pub fn generate_skewed_instance(
    n: usize,
    groups: usize,
    skew: f64,
    degree: f64,
    seed: u64,
) -> Result<(PartitionedUniverse, CoverageOracle)> {
    generate_skewed_graph(&SkewedGraphSpec {
        n,
        groups,
        skew,
        degree,
        majority_degree_ratio: 1.0,
        seed,
    })
}

/// Parameters of [`generate_skewed_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewedGraphSpec {
    pub n: usize,
    pub groups: usize,
    /// Share of color 0.
    pub skew: f64,
    /// Expected average degree.
    pub degree: f64,
    /// Expected degree of a color-0 vertex relative to the others. At 1 the
    /// graph is Erdős–Rényi; otherwise edges follow a Chung–Lu model with
    /// two weight classes.
    pub majority_degree_ratio: f64,
    pub seed: u64,
}

/// Skewed-color graph with optionally color-dependent degrees.
pub fn generate_skewed_graph(spec: &SkewedGraphSpec) -> Result<(PartitionedUniverse, CoverageOracle)> {
    let SkewedGraphSpec { n, groups, skew, degree, majority_degree_ratio: ratio, seed } = *spec;
    let sizes = skewed_quota(n, groups, skew)?;
    if !(degree >= 0.0) || (n > 1 && degree > (n - 1) as f64) {
        return Err(FairError::InvalidParameter(format!(
            "degree {degree} must lie in [0, n-1]"
        )));
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(FairError::InvalidParameter(format!(
            "majority degree ratio must be positive, got {ratio}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let color_of = assign_colors(&sizes, &mut rng);
    let universe = PartitionedUniverse::new(color_of, groups)?;

    let edges = if ratio == 1.0 || groups == 1 {
        let p = if n > 1 { degree / (n - 1) as f64 } else { 0.0 };
        gnp_edges(n, p, &mut rng)
    } else {
        // Chung–Lu weights w_v ∝ ratio (color 0) or 1, mean `degree`.
        let major = universe.group(0).to_vec();
        let minor: Vec<usize> = (1..groups).flat_map(|c| universe.group(c).to_vec()).collect();
        let mean_r = (ratio * major.len() as f64 + minor.len() as f64) / n as f64;
        let w_major = degree * ratio / mean_r;
        let w_minor = degree / mean_r;
        let total = w_major * major.len() as f64 + w_minor * minor.len() as f64;
        let p = |a: f64, b: f64| (a * b / total).min(1.0);
        let mut edges = Vec::new();
        for (u, v) in gnp_edges(major.len(), p(w_major, w_major), &mut rng) {
            edges.push((major[u], major[v]));
        }
        for (u, v) in gnp_edges(minor.len(), p(w_minor, w_minor), &mut rng) {
            edges.push((minor[u], minor[v]));
        }
        for (a, b) in bipartite_edges(major.len(), minor.len(), p(w_major, w_minor), &mut rng) {
            edges.push((major[a], minor[b]));
        }
        edges
    };
    let oracle = CoverageOracle::from_edges(n, &edges)?;
    Ok((universe, oracle))
}

/// Each of the `a · b` cross pairs independently with probability `p`.
fn bipartite_edges<R: Rng>(a: usize, b: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let cells = a as u64 * b as u64;
    let mut out = Vec::new();
    if p <= 0.0 || cells == 0 {
        return out;
    }
    if p >= 1.0 {
        return (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect();
    }
    let log_q = (1.0 - p).ln();
    let mut k: i64 = -1;
    loop {
        let r: f64 = rng.gen::<f64>();
        k += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        if k < 0 || k as u64 >= cells {
            break;
        }
        let k = k as u64;
        out.push(((k / b as u64) as usize, (k % b as u64) as usize));
    }
    out
}

fn assign_colors<R: Rng>(sizes: &[usize], rng: &mut R) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut color_of = vec![0; n];
    let mut start = 0;
    for (c, &size) in sizes.iter().enumerate() {
        for &v in &perm[start..start + size] {
            color_of[v] = c;
        }
        start += size;
    }
    color_of
}

/// G(n, p) by geometric skipping over the upper triangle.
fn gnp_edges<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if p <= 0.0 || n < 2 {
        return edges;
    }
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w): (i64, i64) = (1, -1);
    let n = n as i64;
    while v < n {
        let r: f64 = rng.gen::<f64>();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v as usize));
        }
    }
    edges
}

/// Parameters for a tag-annotated collection in the style of an image
/// summarization benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct TagCollectionSpec {
    pub n: usize,
    /// Number of distinct tags.
    pub vocabulary: usize,
    pub min_tags: usize,
    pub max_tags: usize,
    /// Zipf exponent of tag popularity; 0 gives uniform tags.
    pub zipf: f64,
    pub seed: u64,
}

impl Default for TagCollectionSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            vocabulary: 300,
            min_tags: 1,
            max_tags: 5,
            zipf: 1.0,
            seed: 0,
        }
    }
}

/// Categories injected with probability 0.5, otherwise category 1.
pub const INJECTED_CATEGORIES: [usize; 5] = [0, 2, 3, 4, 5];

/// Tag collection with six categories: each item is given a uniformly drawn
/// category from [`INJECTED_CATEGORIES`] with probability 0.5 and category 1
/// otherwise.
pub fn generate_tag_collection(
    spec: &TagCollectionSpec,
) -> Result<(PartitionedUniverse, TagCoverOracle)> {
    if spec.n == 0 || spec.vocabulary == 0 || spec.min_tags > spec.max_tags {
        return Err(FairError::InvalidParameter(format!(
            "invalid tag collection parameters {spec:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights: Vec<f64> = (1..=spec.vocabulary)
        .map(|r| 1.0 / (r as f64).powf(spec.zipf))
        .collect();
    let dist = rand::distributions::WeightedIndex::new(&weights)
        .map_err(|e| FairError::InvalidParameter(e.to_string()))?;

    let mut color_of = Vec::with_capacity(spec.n);
    let mut tags = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let c = if rng.gen_bool(0.5) {
            *INJECTED_CATEGORIES.choose(&mut rng).expect("non-empty")
        } else {
            1
        };
        color_of.push(c);
        let k = rng.gen_range(spec.min_tags..=spec.max_tags);
        tags.push((0..k).map(|_| rng.sample(&dist) as u32).collect());
    }
    let universe = PartitionedUniverse::new(color_of, 6)?;
    Ok((universe, TagCoverOracle::new(tags)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SubmodularOracle;

    #[test]
    fn majority_quota_is_exact() {
        let (u, _) = generate_skewed_instance(500, 6, 0.6, 10.0, 7).unwrap();
        assert_eq!(u.group_sizes(), vec![300, 40, 40, 40, 40, 40]);
    }

    #[test]
    fn remainder_spread_over_low_colors() {
        assert_eq!(skewed_quota(10, 4, 0.5).unwrap(), vec![5, 2, 2, 1]);
    }

    #[test]
    fn single_color() {
        let (u, _) = generate_skewed_instance(50, 1, 0.3, 4.0, 1).unwrap();
        assert_eq!(u.group_sizes(), vec![50]);
    }

    #[test]
    fn same_seed_same_graph() {
        let (u1, g1) = generate_skewed_instance(300, 3, 0.5, 6.0, 42).unwrap();
        let (u2, g2) = generate_skewed_instance(300, 3, 0.5, 6.0, 42).unwrap();
        assert_eq!(u1, u2);
        assert_eq!(g1.edges(), g2.edges());
        let (_, g3) = generate_skewed_instance(300, 3, 0.5, 6.0, 43).unwrap();
        assert_ne!(g1.edges(), g3.edges());
    }

    #[test]
    fn infeasible_parameters() {
        assert!(generate_skewed_instance(3, 5, 0.5, 1.0, 0).is_err());
        assert!(generate_skewed_instance(10, 2, 0.0, 1.0, 0).is_err());
        assert!(generate_skewed_instance(10, 3, 1.0, 1.0, 0).is_err());
        assert!(generate_skewed_instance(10, 0, 0.5, 1.0, 0).is_err());
        assert!(generate_skewed_instance(10, 2, 0.5, 20.0, 0).is_err());
    }

    #[test]
    fn average_degree_close_to_target() {
        let (_, g) = generate_skewed_instance(2000, 4, 0.4, 10.0, 5).unwrap();
        let avg = 2.0 * g.edges().len() as f64 / 2000.0;
        assert!((avg - 10.0).abs() < 0.5, "average degree {avg}");
    }

    #[test]
    fn degree_ratio_shifts_degrees() {
        let spec = SkewedGraphSpec {
            n: 3000,
            groups: 4,
            skew: 0.5,
            degree: 8.0,
            majority_degree_ratio: 3.0,
            seed: 2,
        };
        let (u, g) = generate_skewed_graph(&spec).unwrap();
        let deg = |v: usize| g.neighbors(v).len() as f64;
        let mean = |vs: &[usize]| vs.iter().map(|&v| deg(v)).sum::<f64>() / vs.len() as f64;
        let major = mean(u.group(0));
        let minor: Vec<usize> = (1..4).flat_map(|c| u.group(c).to_vec()).collect();
        let minor = mean(&minor);
        assert!((major / minor - 3.0).abs() < 0.3, "{major} / {minor}");
        let avg = 2.0 * g.edges().len() as f64 / 3000.0;
        assert!((avg - 8.0).abs() < 0.5, "average degree {avg}");
        let (u2, g2) = generate_skewed_graph(&spec).unwrap();
        assert_eq!((u, g.edges()), (u2, g2.edges()));
    }

    #[test]
    fn ratio_one_is_erdos_renyi() {
        let spec = SkewedGraphSpec {
            n: 300,
            groups: 3,
            skew: 0.5,
            degree: 6.0,
            majority_degree_ratio: 1.0,
            seed: 42,
        };
        let (_, a) = generate_skewed_graph(&spec).unwrap();
        let (_, b) = generate_skewed_instance(300, 3, 0.5, 6.0, 42).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!(generate_skewed_graph(&SkewedGraphSpec { majority_degree_ratio: 0.0, ..spec }).is_err());
    }

    #[test]
    fn tag_collection_categories() {
        let spec = TagCollectionSpec {
            n: 4000,
            seed: 9,
            ..Default::default()
        };
        let (u, o) = generate_tag_collection(&spec).unwrap();
        let sizes = u.group_sizes();
        assert_eq!(sizes.len(), 6);
        let share1 = sizes[1] as f64 / 4000.0;
        assert!((share1 - 0.5).abs() < 0.04, "category 1 share {share1}");
        assert!(o.evaluate(&u.all_elements()) > 0.0);
    }
}

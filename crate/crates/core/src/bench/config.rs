//! Experiment configuration, read from a small TOML file:
//!
//! ```toml
//! [dataset]
//! kind = "twitch-like"      # twitch-like | corel-like | graph | tags
//! n = 5000
//! groups = 6
//! skew = 0.6
//! degree = 10.0
//! majority_degree_ratio = 1.0   # expected degree of color 0 vs. the rest
//! seed = 1
//!
//! [fairness]
//! lower_factor = 0.9        # p_c = lower_factor / C
//! upper_factor = 1.1        # q_c = upper_factor / C
//!
//! [run]
//! algorithms = ["greedy-bi", "greedy-fairness-bi", "threshold-fairness-bi"]
//! tau = [1000.0, 2000.0]
//! seeds = [0]
//! epsilon = 0.1
//! alpha = 0.2
//! ```
//!
//! File datasets use `edges`/`labels` (`kind = "graph"`) or `tags`/`labels`
//! (`kind = "tags"`); relative paths resolve against the config file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{FairError, Result};
use crate::model::{FairnessFractions, Ratio, DEFAULT_DENOMINATOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    GreedyBi,
    GreedyFairnessBi,
    ThresholdFairnessBi,
    CtgContinuous,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::GreedyBi,
        Algorithm::GreedyFairnessBi,
        Algorithm::ThresholdFairnessBi,
        Algorithm::CtgContinuous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GreedyBi => "greedy-bi",
            Algorithm::GreedyFairnessBi => "greedy-fairness-bi",
            Algorithm::ThresholdFairnessBi => "threshold-fairness-bi",
            Algorithm::CtgContinuous => "ctg-continuous",
        }
    }

    /// Whether the algorithm goes through a fairness converter.
    pub fn is_fair(self) -> bool {
        self != Algorithm::GreedyBi
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = FairError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| FairError::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    TwitchLike {
        n: usize,
        groups: usize,
        skew: f64,
        degree: f64,
        majority_degree_ratio: f64,
        seed: u64,
    },
    CorelLike {
        n: usize,
        vocabulary: usize,
        min_tags: usize,
        max_tags: usize,
        zipf: f64,
        seed: u64,
    },
    Graph {
        edges: PathBuf,
        labels: PathBuf,
    },
    Tags {
        tags: PathBuf,
        labels: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FairnessSpec {
    /// `p_c = lower / C`, `q_c = upper / C`.
    Factors { lower: f64, upper: f64 },
    Explicit { lower: Vec<f64>, upper: Vec<f64> },
}

impl FairnessSpec {
    pub fn fractions(&self, num_colors: usize) -> Result<FairnessFractions> {
        let cfg = |e: FairError| FairError::Config(e.to_string());
        match self {
            FairnessSpec::Factors { lower, upper } => {
                let scaled = |v: f64| -> Result<Ratio> {
                    let r = Ratio::from_f64(v, DEFAULT_DENOMINATOR)?;
                    Ratio::new(r.numer(), r.denom() * num_colors as u64)
                };
                let p = scaled(*lower).map_err(cfg)?;
                let q = scaled(*upper).map_err(cfg)?;
                FairnessFractions::new(vec![p; num_colors], vec![q; num_colors]).map_err(cfg)
            }
            FairnessSpec::Explicit { lower, upper } => {
                if lower.len() != num_colors || upper.len() != num_colors {
                    return Err(FairError::Config(format!(
                        "fairness arrays need {num_colors} entries"
                    )));
                }
                FairnessFractions::from_f64(lower, upper).map_err(cfg)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub fairness: FairnessSpec,
    pub algorithms: Vec<Algorithm>,
    pub taus: Vec<f64>,
    pub seeds: Vec<u64>,
    pub epsilon: f64,
    pub alpha: f64,
    pub delta: f64,
    /// Sample divisor for the continuous algorithm.
    pub scale: f64,
    pub max_kappa: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dataset: RawDataset,
    #[serde(default)]
    fairness: RawFairness,
    run: RawRun,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    kind: String,
    n: Option<usize>,
    groups: Option<usize>,
    skew: Option<f64>,
    degree: Option<f64>,
    majority_degree_ratio: Option<f64>,
    seed: Option<u64>,
    vocabulary: Option<usize>,
    min_tags: Option<usize>,
    max_tags: Option<usize>,
    zipf: Option<f64>,
    edges: Option<PathBuf>,
    labels: Option<PathBuf>,
    tags: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFairness {
    lower_factor: Option<f64>,
    upper_factor: Option<f64>,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    algorithms: Vec<String>,
    tau: Vec<f64>,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_delta")]
    delta: f64,
    #[serde(default = "default_scale")]
    scale: f64,
    max_kappa: Option<usize>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_alpha() -> f64 {
    0.2
}
fn default_delta() -> f64 {
    0.1
}
fn default_scale() -> f64 {
    1000.0
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| FairError::Config(format!("dataset.{key} is required")))
}

impl ExperimentConfig {
    /// Parses a config; relative dataset paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| FairError::Config(e.to_string()))?;
        let d = raw.dataset;
        let resolve = |p: PathBuf| if p.is_relative() { base_dir.join(p) } else { p };
        let dataset = match d.kind.as_str() {
            "twitch-like" => DatasetSpec::TwitchLike {
                n: d.n.unwrap_or(5000),
                groups: d.groups.unwrap_or(6),
                skew: d.skew.unwrap_or(0.6),
                degree: d.degree.unwrap_or(10.0),
                majority_degree_ratio: d.majority_degree_ratio.unwrap_or(1.0),
                seed: d.seed.unwrap_or(0),
            },
            "corel-like" => DatasetSpec::CorelLike {
                n: d.n.unwrap_or(1000),
                vocabulary: d.vocabulary.unwrap_or(300),
                min_tags: d.min_tags.unwrap_or(1),
                max_tags: d.max_tags.unwrap_or(5),
                zipf: d.zipf.unwrap_or(1.0),
                seed: d.seed.unwrap_or(0),
            },
            "graph" => DatasetSpec::Graph {
                edges: resolve(required(d.edges, "edges")?),
                labels: resolve(required(d.labels, "labels")?),
            },
            "tags" => DatasetSpec::Tags {
                tags: resolve(required(d.tags, "tags")?),
                labels: resolve(required(d.labels, "labels")?),
            },
            other => return Err(FairError::Config(format!("unknown dataset kind {other:?}"))),
        };

        let f = raw.fairness;
        let fairness = match (f.lower, f.upper, f.lower_factor, f.upper_factor) {
            (Some(lower), Some(upper), None, None) => FairnessSpec::Explicit { lower, upper },
            (None, None, lo, hi) => FairnessSpec::Factors {
                lower: lo.unwrap_or(0.9),
                upper: hi.unwrap_or(1.1),
            },
            _ => {
                return Err(FairError::Config(
                    "fairness takes either lower/upper arrays or lower_factor/upper_factor".into(),
                ))
            }
        };

        let r = raw.run;
        let algorithms = r
            .algorithms
            .iter()
            .map(|a| a.parse())
            .collect::<Result<Vec<Algorithm>>>()?;
        if !(r.epsilon > 0.0 && r.epsilon < 1.0) {
            return Err(FairError::Config(format!("run.epsilon = {} not in (0, 1)", r.epsilon)));
        }
        if !(r.alpha > 0.0) {
            return Err(FairError::Config(format!("run.alpha = {} must be positive", r.alpha)));
        }
        if !(r.delta > 0.0 && r.delta < 1.0) {
            return Err(FairError::Config(format!("run.delta = {} not in (0, 1)", r.delta)));
        }
        if !(r.scale >= 1.0) {
            return Err(FairError::Config(format!("run.scale = {} must be >= 1", r.scale)));
        }
        Ok(Self {
            dataset,
            fairness,
            algorithms,
            taus: r.tau,
            seeds: r.seeds,
            epsilon: r.epsilon,
            alpha: r.alpha,
            delta: r.delta,
            scale: r.scale,
            max_kappa: r.max_kappa,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FairError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[dataset]
kind = "twitch-like"
n = 100
groups = 3

[run]
algorithms = ["greedy-bi", "threshold-fairness-bi"]
tau = [10.0, 20.0]
"#;

    #[test]
    fn parses_defaults() {
        let c = ExperimentConfig::parse(BASIC, Path::new(".")).unwrap();
        assert_eq!(c.algorithms, vec![Algorithm::GreedyBi, Algorithm::ThresholdFairnessBi]);
        assert_eq!(c.seeds, vec![0]);
        assert_eq!((c.epsilon, c.alpha, c.scale), (0.1, 0.2, 1000.0));
        assert_eq!(c.fairness, FairnessSpec::Factors { lower: 0.9, upper: 1.1 });
        let f = c.fairness.fractions(6).unwrap();
        assert_eq!(f.lower(0), Ratio::new(900_000, 6_000_000).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("not toml [", Path::new(".")).is_err());
        let bad_alg = BASIC.replace("greedy-bi", "magic");
        assert!(matches!(
            ExperimentConfig::parse(&bad_alg, Path::new(".")),
            Err(FairError::Config(_))
        ));
        let bad_kind = BASIC.replace("twitch-like", "nope");
        assert!(ExperimentConfig::parse(&bad_kind, Path::new(".")).is_err());
        let missing = "[dataset]\nkind = \"graph\"\n[run]\nalgorithms=[]\ntau=[]\n";
        assert!(ExperimentConfig::parse(missing, Path::new(".")).is_err());
    }

    #[test]
    fn resolves_relative_paths() {
        let text = "[dataset]\nkind = \"graph\"\nedges = \"e.txt\"\nlabels = \"/abs/l.txt\"\n[run]\nalgorithms=[]\ntau=[]\n";
        let c = ExperimentConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(
            c.dataset,
            DatasetSpec::Graph {
                edges: PathBuf::from("/base/e.txt"),
                labels: PathBuf::from("/abs/l.txt")
            }
        );
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fairsub::bench::{emit_csv, format_value, run_experiment, ExperimentConfig, RunOptions, RunRecord};
use fairsub::generate::{generate_skewed_graph, generate_tag_collection, SkewedGraphSpec, TagCollectionSpec};
use fairsub::io::{load_graph, write_edges, write_labels, write_tags};
use fairsub::oracle::validate_oracle;
use fairsub::rng::seeded;
use fairsub::{FairError, SubmodularOracle};

/// Benchmark harness for fair submodular cover.
#[derive(Parser)]
#[command(name = "fairsub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (algorithm, τ, seed) cell of an experiment and write a CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use the full Monte-Carlo sample sizes for the continuous algorithm.
        #[arg(long)]
        full_samples: bool,
        /// Report p_c|S| ≤ |S ∩ U_c| ≤ q_c|S| and f(S) ≥ τ instead of the
        /// relaxed per-color guarantee.
        #[arg(long)]
        strict_fair: bool,
    },
    /// Load a graph dataset and check its coverage function.
    Validate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Generate a synthetic dataset.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Files are written to `<prefix>.edges`/`<prefix>.tags` and `<prefix>.labels`.
        #[arg(long)]
        out_prefix: PathBuf,
        /// twitch-like only: expected degree of the majority color relative to the others.
        #[arg(long, default_value_t = 1.0)]
        majority_degree_ratio: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    TwitchLike,
    CorelLike,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_DATASET: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, e: impl std::fmt::Display) -> Self {
        Self { code, message: e.to_string() }
    }
}

/// Exit code for an error raised while loading or generating data.
fn dataset_code(e: &FairError) -> u8 {
    match e {
        FairError::Parse { .. } | FairError::Io(_) | FairError::UnknownElement { .. } | FairError::Csv(_) => {
            EXIT_DATASET
        }
        FairError::Invariant(_) => EXIT_INVARIANT,
        _ => EXIT_CONFIG,
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn verdict(r: &RunRecord, strict: bool) -> &'static str {
    match &r.metrics {
        None => "error",
        Some(m) if strict => {
            if m.strict_fair {
                "fair"
            } else {
                "unfair"
            }
        }
        Some(m) => match m.relaxed_fair {
            Some(true) => "fair",
            Some(false) if m.repair_complete == Some(false) => "unfair (short repair)",
            Some(false) => "unfair",
            None => "n/a",
        },
    }
}

fn run(config: &Path, out: &Path, full_samples: bool, strict_fair: bool) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(config).map_err(|e| Failure::new(EXIT_CONFIG, e))?;
    let exp = run_experiment(&cfg, RunOptions { full_samples, ..Default::default() })
        .map_err(|e| Failure::new(dataset_code(&e), e))?;
    emit_csv(out, &exp.records, exp.num_colors()).map_err(|e| Failure::new(EXIT_CONFIG, e))?;

    let label = if strict_fair { "strict" } else { "relaxed" };
    println!("{:<22} {:>10} {:>10} {:>6} {:>9}  fairness ({label})", "algorithm", "tau", "f", "cost", "diff");
    for r in &exp.records {
        match &r.metrics {
            Some(m) => println!(
                "{:<22} {:>10} {:>10} {:>6} {:>9}  {}",
                r.algorithm,
                format_value(r.tau),
                format_value(m.f),
                m.cost,
                m.fairness_diff.map(|d| format!("{d:.4}")).unwrap_or_else(|| "-".into()),
                verdict(r, strict_fair)
            ),
            None => println!(
                "{:<22} {:>10}  error: {}",
                r.algorithm,
                format_value(r.tau),
                r.error.as_deref().unwrap_or("")
            ),
        }
    }
    let failed = exp.records.iter().filter(|r| r.metrics.is_none()).count();
    println!(
        "{} records ({failed} failed cells) written to {}",
        exp.records.len(),
        out.display()
    );
    let broken: Vec<&RunRecord> = exp.records.iter().filter(|r| r.violates_relaxed_fairness()).collect();
    if let Some(r) = broken.first() {
        return Err(Failure::new(
            EXIT_INVARIANT,
            format!(
                "{} output at tau {} breaks the relaxed fairness guarantee ({} such records)",
                r.algorithm,
                format_value(r.tau),
                broken.len()
            ),
        ));
    }
    Ok(())
}

fn validate(graph: &Path, labels: &Path) -> Result<(), Failure> {
    let (l, oracle) = load_graph(graph, labels).map_err(|e| Failure::new(dataset_code(&e), e))?;
    let n = l.universe.len();
    println!("elements: {n}");
    println!("edges: {}", oracle.edges().len());
    for (c, name) in l.color_names.iter().enumerate() {
        println!("color {c} ({name}): {}", l.universe.group(c).len());
    }
    println!("f(U) = {}", format_value(oracle.evaluate(&l.universe.all_elements())));
    let report = validate_oracle(&oracle, 200, &mut seeded(0));
    if !report.is_clean() {
        return Err(Failure::new(
            EXIT_INVARIANT,
            format!("coverage function failed {} checks", report.violations.len()),
        ));
    }
    println!("oracle checks: {} trials, no violations", report.trials);
    Ok(())
}

fn generate(kind: Kind, n: usize, seed: u64, prefix: &Path, ratio: f64) -> Result<(), Failure> {
    let io_err = |e: FairError| Failure::new(dataset_code(&e), e);
    let labels = with_suffix(prefix, ".labels");
    let names: Vec<String> = (0..6).map(|c| format!("c{c}")).collect();
    match kind {
        Kind::TwitchLike => {
            let spec = SkewedGraphSpec {
                n,
                groups: 6,
                skew: 0.6,
                degree: 10.0f64.min(n.saturating_sub(1) as f64),
                majority_degree_ratio: ratio,
                seed,
            };
            let (universe, oracle) = generate_skewed_graph(&spec).map_err(|e| Failure::new(EXIT_CONFIG, e))?;
            let edges = with_suffix(prefix, ".edges");
            write_edges(&edges, &oracle.edges()).map_err(io_err)?;
            write_labels(&labels, &universe, &names).map_err(io_err)?;
            println!("wrote {} and {}", edges.display(), labels.display());
        }
        Kind::CorelLike => {
            let spec = TagCollectionSpec { n, seed, ..TagCollectionSpec::default() };
            let (universe, oracle) = generate_tag_collection(&spec).map_err(|e| Failure::new(EXIT_CONFIG, e))?;
            let tags = with_suffix(prefix, ".tags");
            write_tags(&tags, &oracle).map_err(io_err)?;
            write_labels(&labels, &universe, &names).map_err(io_err)?;
            println!("wrote {} and {}", tags.display(), labels.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { config, out, full_samples, strict_fair } => run(&config, &out, full_samples, strict_fair),
        Command::Validate { graph, labels } => validate(&graph, &labels),
        Command::Gen { kind, n, seed, out_prefix, majority_degree_ratio } => {
            generate(kind, n, seed, &out_prefix, majority_degree_ratio)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fairsub: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

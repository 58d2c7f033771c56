use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fairsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairsub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen_graph(dir: &Path) -> String {
    let prefix = dir.join("g");
    let p = prefix.to_str().unwrap();
    let o = fairsub(&["gen", "--kind", "twitch-like", "--n", "300", "--seed", "4", "--out-prefix", p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    p.to_string()
}

fn graph_config(dir: &Path, algorithms: &str, taus: &str) -> String {
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        format!(
            "[dataset]\nkind = \"graph\"\nedges = \"g.edges\"\nlabels = \"g.labels\"\n\
             [run]\nalgorithms = [{algorithms}]\ntau = {taus}\nseeds = [0, 1]\n"
        ),
    )
    .unwrap();
    cfg.to_str().unwrap().to_string()
}

/// CSV rows with the wall-clock column blanked.
fn without_timing(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f[6] = "";
            f.join(",")
        })
        .collect()
}

#[test]
fn generate_validate_run() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = gen_graph(dir.path());
    let v = fairsub(&["validate", "--graph", &format!("{prefix}.edges"), "--labels", &format!("{prefix}.labels")]);
    assert_eq!(v.status.code(), Some(0));
    let text = stdout(&v);
    assert!(text.contains("elements: 300"), "{text}");
    assert!(text.contains("no violations"));

    let cfg = graph_config(
        dir.path(),
        "\"greedy-bi\", \"greedy-fairness-bi\", \"threshold-fairness-bi\"",
        "[100.0, 200.0, 1e9]",
    );
    let out = dir.path().join("out.csv");
    let out_s = out.to_str().unwrap();
    let r = fairsub(&["run", "--config", &cfg, "--out", out_s]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let summary = stdout(&r);
    assert!(summary.contains("fairness (relaxed)"));
    assert!(summary.contains("18 records (6 failed cells)"), "{summary}");

    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("algorithm,tau,f,cost,fairness_diff,queries,wall_ms,seed,count_0"));
    assert_eq!(lines.len(), 19);
    assert!(!csv.contains('\r'));

    // Same seeds give the same records.
    let again = dir.path().join("again.csv");
    fairsub(&["run", "--config", &cfg, "--out", again.to_str().unwrap()]);
    assert_eq!(without_timing(&csv), without_timing(&fs::read_to_string(&again).unwrap()));

    let strict = fairsub(&["run", "--config", &cfg, "--out", out_s, "--strict-fair"]);
    assert_eq!(strict.status.code(), Some(0));
    assert!(stdout(&strict).contains("fairness (strict)"));
}

#[test]
fn empty_algorithm_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    gen_graph(dir.path());
    let cfg = graph_config(dir.path(), "", "[10.0]");
    let out = dir.path().join("out.csv");
    let r = fairsub(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1);
}

#[test]
fn corel_like_generation() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("c");
    let o = fairsub(&["gen", "--kind", "corel-like", "--n", "50", "--seed", "1", "--out-prefix", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let tags = fs::read_to_string(dir.path().join("c.tags")).unwrap();
    let labels = fs::read_to_string(dir.path().join("c.labels")).unwrap();
    assert_eq!(tags.lines().count(), 50);
    assert_eq!(labels.lines().count(), 50);
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[dataset]\nkind = \"twitch-like\"\nbogus = 1\n[run]\nalgorithms = []\ntau = []\n").unwrap();
    let out = dir.path().join("o.csv");
    let r = fairsub(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&r.stderr).is_empty());

    fs::write(&cfg, "[dataset]\nkind = \"twitch-like\"\n[run]\nalgorithms = [\"nope\"]\ntau = [1.0]\n").unwrap();
    let r = fairsub(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));

    let missing = fairsub(&["run", "--config", "/nonexistent/cfg.toml", "--out", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));

    assert_eq!(fairsub(&["run"]).status.code(), Some(1));
}

#[test]
fn dataset_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = graph_config(dir.path(), "\"greedy-bi\"", "[10.0]");
    let out = dir.path().join("o.csv");
    // No dataset files yet.
    let r = fairsub(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));

    let edges = dir.path().join("bad.edges");
    let labels = dir.path().join("bad.labels");
    fs::write(&edges, "0 1\n1 x\n").unwrap();
    fs::write(&labels, "0 a\n1 b\n").unwrap();
    let v = fairsub(&["validate", "--graph", edges.to_str().unwrap(), "--labels", labels.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&v.stderr).contains(":2:"));
}

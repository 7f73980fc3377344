use std::path::Path;
use std::process::Command;

use netrobust_core::Graph;

fn cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_netrobust"))
        .args(args)
        .env_remove("NETROBUST_WORKERS")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_edge_lists_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    cli(&[
        "generate",
        "--family",
        "er",
        "--n",
        "15",
        "--count",
        "3",
        "--seed",
        "4",
        "--out",
        s(dir.path()),
    ]);
    let manifest = std::fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
    let mut lines = manifest.lines();
    assert_eq!(lines.next(), Some("filename,n,m,seed"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let g = Graph::read_edge_list(dir.path().join(f[0])).unwrap();
        assert_eq!(g.num_nodes().to_string(), f[1]);
        assert_eq!(g.num_edges().to_string(), f[2]);
        assert!(g.is_connected());
    }
}

#[test]
fn estimate_matches_exact_on_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p3.edges");
    Graph::path(3).write_edge_list(&p).unwrap();
    let out = cli(&[
        "estimate",
        "--input",
        s(&p),
        "--objective",
        "random",
        "--n-sims",
        "20000",
        "--seed",
        "2",
    ]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("mean,std_error,n_sims"));
    let f: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((f[0] - 7.0 / 9.0).abs() < 4.0 * f[1], "{f:?}");
    assert_eq!(f[2], 20000.0);
}

#[test]
fn baseline_reports_rows_mean_and_std() {
    let out = cli(&[
        "baseline",
        "--strategy",
        "eres",
        "--objective",
        "targeted",
        "--budget",
        "2",
        "--family",
        "ba",
        "--n",
        "12",
        "--count",
        "5",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "graph,reward");
    assert_eq!(lines.len(), 1 + 5 + 2);
    assert!(lines[6].starts_with("mean,"));
    assert!(lines[7].starts_with("std,"));
    let again = cli(&[
        "--workers",
        "2",
        "baseline",
        "--strategy",
        "eres",
        "--objective",
        "targeted",
        "--budget",
        "2",
        "--family",
        "ba",
        "--n",
        "12",
        "--count",
        "5",
    ]);
    assert_eq!(out, again);
}

#[test]
fn train_then_evaluate_round_trips_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("q.rndq");
    let log = dir.path().join("log.csv");
    let train = [
        "train",
        "--objective",
        "random",
        "--budget",
        "1",
        "--family",
        "ba",
        "--n",
        "8",
        "--train",
        "4",
        "--validate",
        "2",
        "--steps",
        "8",
        "--batch-size",
        "4",
        "--validation-every",
        "4",
        "--embed-dim",
        "4",
        "--hidden",
        "4",
        "--rounds",
        "1",
        "--n-sims",
        "8",
    ];
    let mut args = train.to_vec();
    args.extend(["--checkpoint", s(&ckpt), "--log", s(&log)]);
    cli(&args);
    let text = std::fs::read_to_string(&log).unwrap();
    assert!(text.starts_with("step,loss,epsilon,validation_reward\n"));
    assert_eq!(text.lines().count(), 1 + 3);

    let eval = [
        "evaluate",
        "--checkpoint",
        s(&ckpt),
        "--objective",
        "random",
        "--budget",
        "1",
        "--family",
        "ba",
        "--n",
        "8",
        "--count",
        "3",
    ];
    let a = cli(&eval);
    assert_eq!(a.lines().count(), 1 + 3 + 2);
    assert_eq!(a, cli(&eval));

    let sl = dir.path().join("sl.rndq");
    let mut args = train.to_vec();
    args.extend(["--agent", "sl", "--checkpoint", s(&sl)]);
    cli(&args);
    let eval_sl = [
        "evaluate",
        "--checkpoint",
        s(&sl),
        "--objective",
        "random",
        "--budget",
        "1",
        "--family",
        "ba",
        "--n",
        "8",
        "--count",
        "3",
    ];
    assert_eq!(cli(&eval_sl).lines().count(), 1 + 3 + 2);
}

#[test]
fn dot_lists_every_node_and_highlights_added_edges() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.edges");
    let grown = dir.path().join("grown.edges");
    let out = dir.path().join("g.dot");
    let g = Graph::path(5);
    g.write_edge_list(&base).unwrap();
    let mut h = g.clone();
    h.add_edge(netrobust_core::NodePair::new(0, 4).unwrap())
        .unwrap();
    h.write_edge_list(&grown).unwrap();
    cli(&[
        "dot",
        "--input",
        s(&grown),
        "--output",
        s(&out),
        "--base",
        s(&base),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("graph G {\n"));
    let nodes = text
        .lines()
        .filter(|l| l.trim_end().ends_with(';') && !l.contains("--"))
        .count();
    assert_eq!(nodes, 5);
    let edges: Vec<&str> = text.lines().filter(|l| l.contains("--")).collect();
    assert_eq!(edges.len(), h.num_edges());
    assert_eq!(edges.iter().filter(|l| l.contains("dashed")).count(), 1);
    assert!(text.contains("0 -- 4 [color=red, style=dashed];"));
}

#[test]
fn table_command_reads_toml_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "objectives = [\"random\"]\nbudgets = [1]\nagents = [\"ldp\", \"random\"]\nn_sims = 6\n[graphs]\nfamilies = [\"er\"]\nn = 10\ntest = 3\n",
    )
    .unwrap();
    let out = dir.path().join("res");
    cli(&["table", "--config", s(&cfg), "--out", s(&out)]);
    let summary = std::fs::read_to_string(out.join("table_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2);
    let raw = std::fs::read_to_string(out.join("table_raw.csv")).unwrap();
    assert_eq!(raw.lines().count(), 1 + 2 * 3);
}

#[test]
fn bad_worker_env_is_an_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_netrobust"))
        .args(["estimate", "--input", "missing.edges"])
        .env("NETROBUST_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("NETROBUST_WORKERS"));
}

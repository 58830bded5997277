use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn iodgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iodgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CHAIN: &str = r#"{
  "format_version": 1,
  "nodes": [
    {"id": "i", "role": "input"},
    {"id": "h", "role": "intermediate", "tag": "relay"},
    {"id": "o", "role": "output"}
  ],
  "edges": [["i", "h"], ["h", "o"]]
}"#;

#[test]
fn construct_theorem1_child_is_non() {
    let dir = tempfile::tempdir().unwrap();
    let out = iodgraph(&["construct", "theorem1", "--j", "1", "--k", "1", "--out-dir", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["input_parent"]["informativeness"], "full");

    let child = dir.path().join("child.json");
    let out = iodgraph(&["classify", path(&child)]);
    assert!(out.status.success());
    let class: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(class["informativeness"], "non");
}

#[test]
fn census_default_has_26_rows() {
    let out = iodgraph(&["census", "--inputs", "3", "--outputs", "2", "--intermediates", "5", "--quiet"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,total,non,partial,very,full");
    assert_eq!(lines.len(), 27);
    assert_eq!(lines[1], "0,1,1,0,0,0");
    assert!(lines[14].starts_with("13,5200300,"));
    assert_eq!(lines[26], "25,1,0,0,0,1");
}

#[test]
fn graph_round_trips_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("chain.json");
    fs::write(&src, CHAIN).unwrap();

    let json1 = stdout(&iodgraph(&["convert", path(&src)]));
    let canon = dir.path().join("canon.json");
    fs::write(&canon, &json1).unwrap();
    assert_eq!(stdout(&iodgraph(&["convert", path(&canon)])), json1);

    let dot = stdout(&iodgraph(&["convert", path(&src), "--format", "dot"]));
    let dot_path = dir.path().join("chain.dot");
    fs::write(&dot_path, &dot).unwrap();
    assert_eq!(stdout(&iodgraph(&["convert", path(&dot_path)])), json1);
    assert_eq!(stdout(&iodgraph(&["convert", path(&dot_path), "--format", "dot"])), dot);
}

#[test]
fn exit_codes_follow_contract() {
    let dir = tempfile::tempdir().unwrap();

    assert_eq!(iodgraph(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(iodgraph(&["--help"]).status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"nodes":[{"id":"i","role":"input"},{"id":"o","role":"output"}],"edges":[["o","i"]]}"#,
    )
    .unwrap();
    let out = iodgraph(&["validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_graph");
    assert!(!err["violations"].as_array().unwrap().is_empty());

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\n  \"nodes\": [\n    oops\n").unwrap();
    let out = iodgraph(&["classify", path(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["line"], 3);

    let chain = dir.path().join("chain.json");
    fs::write(&chain, CHAIN).unwrap();
    let lonely = dir.path().join("lonely.json");
    fs::write(
        &lonely,
        r#"{"nodes":[{"id":"i","role":"input"},{"id":"o","role":"output"}],"edges":[]}"#,
    )
    .unwrap();
    let out = iodgraph(&["crossover", path(&chain), path(&lonely), "--psi-a", "i", "--psi-b", "i"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "incompatible");

    let out = iodgraph(&["census", "--budget", "1000", "--quiet"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn crossover_is_reproducible_and_writes_child() {
    let dir = tempfile::tempdir().unwrap();
    let out = iodgraph(&["construct", "theorem5", "--j", "2", "--out-dir", path(dir.path())]);
    assert!(out.status.success());
    let a = dir.path().join("input_parent.json");
    let b = dir.path().join("output_parent.json");
    let child = dir.path().join("x.json");
    let args = [
        "crossover",
        path(&a),
        path(&b),
        "--auto-contiguous",
        "--matching",
        "random",
        "--seed",
        "17",
        "--child",
        path(&child),
    ];
    let first = iodgraph(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = iodgraph(&args);
    assert_eq!(first.stdout, second.stdout);
    let record: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(record["seed"], 17);
    let out = iodgraph(&["validate", path(&child)]);
    assert!(out.status.success());
}

#[test]
fn partitions_and_membranes_stream_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    iodgraph(&["construct", "competing", "--out-dir", path(dir.path())]);
    let a = dir.path().join("input_parent.json");
    let b = dir.path().join("output_parent.json");

    let out = iodgraph(&["partitions", path(&a)]);
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    let out = iodgraph(&["partitions", path(&a), "--count-only", "--filter", "contiguous"]);
    let count: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(count["count"], 4);

    let out = iodgraph(&[
        "membranes",
        path(&a),
        path(&b),
        "--psi-a",
        "I1,I2,N1,N2",
        "--psi-b",
        "I1,I2",
        "--naming",
        "raw",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn evolve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    iodgraph(&["construct", "theorem5", "--j", "2", "--out-dir", path(dir.path())]);
    let cfg = dir.path().join("evolve.json");
    fs::write(
        &cfg,
        r#"{"population_size": 6, "generations": 3, "fitness": "informativeness-rank", "seed": 9}"#,
    )
    .unwrap();
    let a = dir.path().join("input_parent.json");
    let b = dir.path().join("output_parent.json");
    let args = ["evolve", "--config", path(&cfg), path(&a), path(&b)];
    let first = iodgraph(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, iodgraph(&args).stdout);
    assert_eq!(stdout(&first).lines().count(), 4);
}

#[test]
fn sampled_census_is_reproducible() {
    let args = ["census", "--sample", "50", "--seed", "3", "--quiet"];
    let first = iodgraph(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, iodgraph(&args).stdout);
    assert!(stdout(&first).starts_with("# sampled per_edge_count=50 seed=3\n"));
}

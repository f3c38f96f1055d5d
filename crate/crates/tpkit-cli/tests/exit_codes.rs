use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn tpkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpkit"))
        .args(args)
        .env_remove("TPKIT_BUDGET_SECONDS")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    tpkit(args).status.code().expect("exited")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tpkit-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, file: &str, v: &Value) -> String {
    let p = dir.join(file);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn verify_canonical_tree_exits_zero() {
    let dir = scratch("verify");
    let cert = dir.join("c.json");
    let c = cert.to_str().unwrap();
    assert_eq!(code(&["canonical", "--kind", "sop2", "--shape", "2x3", "--out", c]), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let tree = write(&dir, "t.json", &v["payload"]["tree"]);
    assert_eq!(code(&["verify", "--kind", "sop2", "--tree", &tree]), 0);
    assert_eq!(code(&["verify", "--cert", c]), 0);
    // Paths are not 2-inconsistent siblings of a tp1 on a single set.
    let bad = write(&dir, "bad.json", &json!({"branching": 2, "depth": 2, "domain_size": 1, "labels": {"0": [0], "1": [0]}}));
    let o = tpkit(&["--json", "verify", "--kind", "sop2", "--tree", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["verdict"]["ok"], false);
}

#[test]
fn verify_output_is_reproducible() {
    let dir = scratch("repro");
    let c = dir.join("c.json");
    assert_eq!(code(&["canonical", "--kind", "tp2", "--dims", "2x3", "--out", c.to_str().unwrap()]), 0);
    let a = tpkit(&["--json", "verify", "--cert", c.to_str().unwrap()]);
    let b = tpkit(&["--json", "verify", "--cert", c.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn search_exit_codes() {
    let dir = scratch("search");
    let single = write(&dir, "s.json", &json!({"domain_size": 3, "sets": {"a": [0, 1]}}));
    let o = tpkit(&["search", "--kind", "tp1", "--shape", "2x2", "--system", &single]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("no witness (exhaustive)"));

    let two = write(&dir, "two.json", &json!({"domain_size": 2, "sets": {"a": [0], "b": [1]}}));
    let o = tpkit(&["--json", "search", "--kind", "tp1", "--shape", "2x2", "--system", &two]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["assignment"], json!(["a", "b"]));

    // Unpruned search over 2^2 assignments with room for 1.
    assert_eq!(
        code(&["search", "--kind", "tp1", "--shape", "2x2", "--system", &two, "--no-prune", "--max-space", "1"]),
        3
    );
    assert_eq!(
        code(&["search", "--kind", "tp1", "--shape", "2x2", "--system", &two, "--max-visits", "1"]),
        3
    );
    assert_eq!(code(&["search", "--kind", "tp1", "--system", &two]), 2);
    assert_eq!(code(&["search", "--kind", "tp1", "--shape", "2x2", "--system", &two, "--family", "zz"]), 2);
}

#[test]
fn transform_round_trip() {
    let dir = scratch("transform");
    let c = dir.join("c.json");
    let s = dir.join("s.json");
    assert_eq!(code(&["canonical", "--kind", "cdt_n:2", "--shape", "2x3", "--out", c.to_str().unwrap()]), 0);
    let o = tpkit(&["--json", "transform", "--name", "cdt2-to-sct", "--in", c.to_str().unwrap(), "--out", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["provenance"]["transform"], "cdt2_to_sct");
    assert_eq!(code(&["verify", "--cert", s.to_str().unwrap()]), 0);
    // Wrong kind is a data error, a missing parameter a usage error.
    assert_eq!(code(&["transform", "--name", "inp-halving", "--in", c.to_str().unwrap()]), 2);
    assert_eq!(code(&["transform", "--name", "sctk-to-cdt2-step", "--in", s.to_str().unwrap()]), 2);
}

#[test]
fn rejected_input_exits_one() {
    let dir = scratch("reject");
    let bad = write(
        &dir,
        "bad.json",
        &json!({"kind": "cdt_n", "params": {"n": 2}, "payload": {"tree": {"branching": 2, "depth": 2, "domain_size": 1, "labels": {"0": [0], "1": [0]}}}}),
    );
    assert_eq!(code(&["transform", "--name", "cdt2-to-sct", "--in", &bad]), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["verify", "--kind", "sop2", "--tree", "/nonexistent/t.json"]), 2);
    assert_eq!(code(&["verify", "--kind", "nope", "--tree", "x.json"]), 2);
    assert_eq!(code(&["canonical", "--kind", "sop2", "--shape", "3x2"]), 2);
    assert_eq!(code(&["canonical", "--kind", "sop2", "--shape", "2x2", "--out", "/nonexistent/dir/c.json"]), 2);
    assert_eq!(code(&["search", "--threads", "0", "--kind", "tp1", "--shape", "2x2", "--system", "x"]), 2);
}

#[test]
fn qftp_and_op() {
    let o = tpkit(&["--json", "qftp", "--lang", "L0", "0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["arity"], 2);
    let o = tpkit(&["--json", "op", "--op", "comb", "--target", "3x2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["image"]["1"], json!(["1.0"]));
    assert_eq!(code(&["op", "--op", "widening", "--target", "2x2"]), 2);
    assert_eq!(code(&["op", "--op", "restriction", "--source", "2x3", "--levels", "0,2"]), 0);
}

#[test]
fn pfc_commands() {
    let o = tpkit(&["--json", "pfc", "tp2-demo", "--rows", "2", "--cols", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["certificate"]["verdict"]["ok"], true);

    let dir = scratch("pfc");
    let sig = json!([{"name": "R", "arity": 2}]);
    let common = write(&dir, "a.json", &json!({"objects": ["x"], "parameters": ["p"], "signature": sig, "structures": {}}));
    let left = write(
        &dir,
        "b.json",
        &json!({"objects": ["x", "y"], "parameters": ["p"], "signature": sig, "structures": {"p": {"R": [["x", "y"], ["y", "x"]]}}}),
    );
    let right = write(&dir, "c.json", &json!({"objects": ["x", "y"], "parameters": ["p"], "signature": sig, "structures": {}}));
    let o = tpkit(&["--json", "pfc", "amalgamate", "--oracle", "graph", "--common", &common, "--left", &left, "--right", &right]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["result"]["objects"], json!(["x", "y", "y'"]));
    assert_eq!(code(&["pfc", "in-class", "--oracle", "graph", "--structure", &left]), 0);
    assert_eq!(code(&["pfc", "in-class", "--oracle", "equivalence", "--structure", &left]), 2);
    assert_eq!(code(&["pfc", "in-class", "--oracle", "nope", "--structure", &left]), 2);
    let loopy = write(
        &dir,
        "l.json",
        &json!({"objects": ["x"], "parameters": ["p"], "signature": sig, "structures": {"p": {"R": [["x", "x"]]}}}),
    );
    assert_eq!(code(&["pfc", "in-class", "--oracle", "graph", "--structure", &loopy]), 1);
}

#[test]
fn fuzz_small_run() {
    let o = tpkit(&["--json", "fuzz", "--suite", "pfc", "--seed", "7", "--count", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["suites"][0]["failures"], 0);
}

#[test]
fn env_deadline_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_tpkit"))
        .args(["search", "--kind", "tp1", "--shape", "2x2", "--system", "x.json"])
        .env("TPKIT_BUDGET_SECONDS", "soon")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

mod common;

use std::io::Write;
use std::process::{Command, Stdio};

use graphring::cli::{run, SEED_VAR};
use serde_json::Value;

use common::*;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn invoke(args: &[&str], seed: Option<&str>, stdin: &str) -> Outcome {
    let mut argv = vec!["graphring"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, seed.map(String::from), &mut stdin.as_bytes(), &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn fixture(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn json(args: &[&str]) -> Value {
    let o = invoke(args, None, "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

#[test]
fn homology_of_triangle_has_rank_eight() {
    let v = json(&["homology", &fixture("triangle.txt")]);
    assert_eq!(v["generators"].as_array().unwrap().len(), 8);
}

#[test]
fn ring_table_format_shows_products() {
    let o = invoke(&["--format", "table", "ring", &fixture("triangle.txt")], None, "");
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("-2t_R"));
    assert!(o.stdout.contains("-2alpha1"));
}

#[test]
fn consum_on_chain_succeeds() {
    let o = invoke(&["--format", "table", "consum", &fixture("chain.txt")], None, "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("quotient ranks (1, 7, 7, 1)"));
    assert!(o.stdout.contains("t_P = 2t_R"));
}

#[test]
fn consum_rejects_cycles_with_validation_code() {
    let o = invoke(&["consum", &fixture("triangle.txt")], None, "");
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("cycle"));
}

#[test]
fn analyze_form_verdicts() {
    assert_eq!(json(&["obstruct", &fixture("awkward.json")])["obstructed"], true);
    let v = json(&["analyze-form", &fixture("split.json")]);
    assert_eq!(v["rank3_verdict"], "splits");
    let v = json(&["analyze-form", &fixture("zero.json")]);
    assert_eq!(v["radical_dim"], 4);
}

#[test]
fn obstruct_accepts_a_graph() {
    let o = invoke(&["obstruct", &fixture("chain.txt")], None, "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["obstructed"], false);
}

#[test]
fn malformed_input_is_a_parse_error() {
    let o = invoke(&["homology", "-"], None, "node X genus one\n");
    assert_eq!(o.code, 2);
    let o = invoke(&["analyze-form", "-"], None, "{\"dim\": 3, \"terms\": [[0, 1]]}");
    assert_eq!(o.code, 2);
    let o = invoke(&["ring", "/nonexistent/graph.txt"], None, "");
    assert_eq!(o.code, 2);
    let o = invoke(&["no-such-command"], None, "");
    assert_eq!(o.code, 2);
}

#[test]
fn stdin_matches_file_input() {
    let from_file = invoke(&["ring", &fixture("chain.txt")], None, "");
    let from_stdin = invoke(&["ring", "-"], None, &fixture_text("chain.txt"));
    assert_eq!(from_file.code, 0);
    assert_eq!(from_file.stdout, from_stdin.stdout);
}

#[test]
fn random_tree_golden() {
    let o = invoke(&["--format", "table", "random-tree", "--seed", "0"], None, "");
    assert_eq!(o.stdout, fixture_text("random_tree_seed0.txt"));
}

#[test]
fn env_seed_overrides_flag() {
    let flagged = invoke(&["random-tree", "--seed", "17"], None, "");
    let env = invoke(&["random-tree", "--seed", "3"], Some("17"), "");
    assert_eq!(flagged.stdout, env.stdout);
    let other = invoke(&["random-tree", "--seed", "18"], None, "");
    assert_ne!(flagged.stdout, other.stdout);
    assert_eq!(invoke(&["random-tree"], Some("x"), "").code, 1);
}

#[test]
fn normalize_round_trips_through_text() {
    let o = invoke(&["--format", "table", "normalize", &fixture("loops.txt")], None, "");
    assert_eq!(o.code, 0);
    let again = invoke(&["--format", "table", "normalize", "-"], None, &o.stdout);
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn binary_reads_environment_seed() {
    let exe = env!("CARGO_BIN_EXE_graphring");
    let with_env = Command::new(exe)
        .args(["--format", "table", "random-tree", "--seed", "5"])
        .env(SEED_VAR, "0")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    assert_eq!(String::from_utf8(with_env.stdout).unwrap(), fixture_text("random_tree_seed0.txt"));

    let mut child = Command::new(exe)
        .args(["ring", "-"])
        .env_remove(SEED_VAR)
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"node X genus 0\nedge X Y +\n").unwrap();
    assert_eq!(child.wait().unwrap().code(), Some(1));
}

mod common;

use std::process::Command;

use common::fixture_path;
use serde_json::Value;
use ultrashift::cli::{run, EXIT_DIAGNOSTICS, EXIT_OK, EXIT_UNKNOWN, SCHEMA_VERSION};

fn fx(name: &str) -> String {
    fixture_path(name).display().to_string()
}

fn cli(args: &[&str]) -> ultrashift::cli::Outcome {
    run(std::iter::once("ultrashift").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = cli(&full);
    let doc = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    (out.code, doc)
}

fn envelope(doc: &Value, command: &str, status: &str) {
    assert_eq!(doc["schema_version"], SCHEMA_VERSION);
    assert_eq!(doc["command"], command);
    assert_eq!(doc["status"], status);
    assert!(doc["diagnostics"].is_array());
}

const X: &str = "tail:f[0]|e@1";
const Y: &str = "fin:|r(e[0])";

#[test]
fn analyze_reports_verdicts() {
    let (code, doc) = json(&["analyze", &fx("two_loops.ug")]);
    assert_eq!(code, EXIT_OK);
    envelope(&doc, "analyze", "ok");
    assert_eq!(doc["result"]["verdict"]["verdict"], "chaotic");

    let (code, doc) = json(&["analyze", &fx("two_family.ug")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["result"]["verdict"]["verdict"], "not_chaotic");
    assert_eq!(doc["result"]["grading_verified"], true);
}

#[test]
fn cp_lists_witnesses() {
    let (code, doc) = json(&["cp", &fx("two_loops.ug"), "--vertex", "w[0]", "--limit", "2"]);
    assert_eq!(code, EXIT_OK);
    envelope(&doc, "cp", "ok");
    assert_eq!(doc["result"]["decision"]["answer"], "yes");
    assert_eq!(doc["result"]["witnesses"].as_array().unwrap().len(), 2);
}

#[test]
fn pair_check_certifies_the_two_family_pair() {
    let (code, doc) = json(&["pair-check", &fx("two_family.ug"), "--x", X, "--y", Y]);
    assert_eq!(code, EXIT_OK);
    envelope(&doc, "pair-check", "ok");
    assert_eq!(doc["result"]["certificate"]["scrambled"], true);
}

#[test]
fn scrambled_sample_needs_chaos() {
    let (code, doc) = json(&["scrambled-sample", &fx("two_loops.ug"), "--count", "3", "--prefix-len", "5"]);
    assert_eq!(code, EXIT_OK);
    envelope(&doc, "scrambled-sample", "ok");
    assert_eq!(doc["result"]["points"].as_array().unwrap().len(), 3);
    assert_eq!(doc["result"]["pairs"].as_array().unwrap().len(), 3);
    assert_eq!(doc["result"]["all_scrambled"], true);

    let (code, doc) = json(&["scrambled-sample", &fx("two_family.ug")]);
    assert_eq!(code, EXIT_DIAGNOSTICS);
    envelope(&doc, "scrambled-sample", "diagnostics");
    assert_eq!(doc["diagnostics"][0]["code"], "not-chaotic");
    assert!(doc["result"].is_null());
}

#[test]
fn trajectory_rows() {
    let args = ["trajectory", &fx("two_loops.ug"), "--x", "ep:|a", "--y", "ep:|b", "--n-max", "4"];
    let out = cli(&args);
    assert_eq!(out.code, EXIT_OK);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "n,rank,value");
    assert_eq!(lines.len(), 6);
    let (_, doc) = json(&args);
    envelope(&doc, "trajectory", "ok");
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r["rank"] == rows[0]["rank"]));
}

#[test]
fn metric_exit_codes() {
    let g = fx("two_loops.ug");
    let (code, doc) = json(&["metric", &g, "--x", "ep:|a", "--y", "ep:|b"]);
    assert_eq!(code, EXIT_OK);
    envelope(&doc, "metric", "ok");
    assert!(doc["result"]["value"].as_f64().unwrap() > 0.0);

    let (code, doc) = json(&["metric", &g, "--x", "ep:a|a", "--y", "ep:|a"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["result"]["value"], 0.0);

    let out = cli(&["--max-rank", "5", "metric", &g, "--x", "ep:a.a.a.a.a.a|a", "--y", "ep:a.a.a.a.a.a|b"]);
    assert_eq!(out.code, EXIT_UNKNOWN);
}

#[test]
fn enum_p_lists_in_dsl_syntax() {
    let (code, doc) = json(&["enum-p", &fx("two_loops.ug"), "--count", "5"]);
    assert_eq!(code, EXIT_OK);
    envelope(&doc, "enum-p", "ok");
    let rows = doc["result"]["ultrapaths"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["ultrapath"], "|w[0]");
    for r in rows {
        let (edges, set) = r["ultrapath"].as_str().unwrap().split_once('|').unwrap();
        assert!(edges.is_empty() || ultrashift::dsl::parse_edges(edges).is_ok(), "{edges}");
        assert!(!set.is_empty());
    }
}

#[test]
fn emitters_of_the_sieve() {
    let (code, doc) = json(&["emitters", &fx("sieve.ug"), "--path", "g[0]"]);
    assert_eq!(code, EXIT_OK);
    envelope(&doc, "emitters", "ok");
    let found = doc["result"]["emitters"].as_array().unwrap();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0]["trace"]["intersection"].as_array().unwrap().len(), 3);
}

#[test]
fn diagnostics_have_positions() {
    let out = cli(&["analyze", &fx("sink.ug")]);
    assert_eq!(out.code, EXIT_DIAGNOSTICS);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("sink.ug:2:"), "{}", out.stderr);
    assert!(out.stderr.contains("[sink]"));

    let (code, doc) = json(&["analyze", &fx("sink.ug")]);
    assert_eq!(code, EXIT_DIAGNOSTICS);
    envelope(&doc, "analyze", "diagnostics");
    assert_eq!(doc["diagnostics"][0]["line"], 2);

    let (code, doc) = json(&["pair-check", &fx("two_loops.ug"), "--x", "ep:|c", "--y", "ep:|a"]);
    assert_eq!(code, EXIT_DIAGNOSTICS);
    assert_eq!(doc["diagnostics"][0]["origin"], "--x");

    let out = cli(&["analyze", "/nonexistent/graph.ug"]);
    assert_eq!(out.code, EXIT_DIAGNOSTICS);
    assert!(out.stderr.contains("[io]"));
}

#[test]
fn usage_errors_are_diagnostics() {
    let out = cli(&["frobnicate"]);
    assert_eq!(out.code, EXIT_DIAGNOSTICS);
    assert!(!out.stderr.is_empty());
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["--json", "scrambled-sample", &fx("two_loops.ug"), "--count", "4", "--seed", "7"];
    assert_eq!(cli(&args), cli(&args));
    let args = ["analyze", &fx("loop_family.ug")];
    assert_eq!(cli(&args), cli(&args));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("ultrashift-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("enum.txt");
    let p = path.display().to_string();
    let out = cli(&["-o", &p, "enum-p", &fx("two_loops.ug"), "--count", "3"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, cli(&["enum-p", &fx("two_loops.ug"), "--count", "3"]).stdout);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn binary_reads_bounds_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_ultrashift");
    let g = fx("two_loops.ug");
    let args = ["metric", &g, "--x", "ep:a.a.a.a.a.a|a", "--y", "ep:a.a.a.a.a.a|b"];
    let low = Command::new(bin).args(args).env("ULTRASHIFT_MAX_RANK", "5").output().unwrap();
    assert_eq!(low.status.code(), Some(EXIT_UNKNOWN));
    let high = Command::new(bin).args(args).env_remove("ULTRASHIFT_MAX_RANK").output().unwrap();
    assert_eq!(high.status.code(), Some(EXIT_OK));
    let flag =
        Command::new(bin).args(args).arg("--max-rank").arg("5").env("ULTRASHIFT_MAX_RANK", "100000").output().unwrap();
    assert_eq!(flag.status.code(), Some(EXIT_UNKNOWN));
}

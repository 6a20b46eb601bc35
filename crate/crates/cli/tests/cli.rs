use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use pricelog_core::{check_labelled_proof, read_proof, Builtin, CostValue, ProofFile, Semiring};
use serde_json::Value;

const RIDDLE: &str = "!p[1](w + b) |- (w*w)+(b*b)";

fn pricelog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pricelog")).args(args).env_remove("PRICELOG_SEMIRING").output().unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pricelog"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn structured(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pricelog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn riddle_costs_three() {
    let o = pricelog(&["cost", RIDDLE]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn exit_codes_follow_the_convention() {
    assert_eq!(pricelog(&["prove", "p |- q"]).status.code(), Some(1));
    assert_eq!(pricelog(&["prove", "p |- p"]).status.code(), Some(0));
    assert_eq!(pricelog(&["prove", "p |- !p[1]p"]).status.code(), Some(2));
    assert_eq!(pricelog(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pricelog(&["--semiring", "tropical", "cost", "p |- p"]).status.code(), Some(2));
    assert_eq!(pricelog(&["prove", "!p[1](w + b) |-[2] (w*w)+(b*b)"]).status.code(), Some(1));
}

#[test]
fn structured_errors_are_records() {
    let o = pricelog(&["--format", "structured", "cost", "p |-"]);
    assert_eq!(o.status.code(), Some(2));
    let v = structured(&o);
    assert_eq!(v["kind"], "parse");
    assert!(v["error"].is_string());
}

#[test]
fn structured_costs_and_proofs_parse_back() {
    let v = structured(&pricelog(&["--format", "structured", "cost", RIDDLE]));
    let cost = Builtin::Cost.parse_literal(v["cost"].as_str().unwrap()).unwrap();
    assert_eq!(cost, CostValue::int(3));
    let ProofFile::Labelled { proof, .. } = read_proof(&v["proof"].to_string()).unwrap() else { panic!("expected labels") };
    check_labelled_proof(&proof, &Builtin::Cost).unwrap();
    assert_eq!(proof.label, cost);

    let v = structured(&pricelog(&["--format", "structured", "prove", "p & q |- q"]));
    assert!(matches!(read_proof(&v["proof"].to_string()).unwrap(), ProofFile::Plain { .. }));
}

#[test]
fn cost_equals_the_spectrum_minimum() {
    for s in [RIDDLE, "!p[1]p, !s[0.8]p, !s[0.8]p |- p * p", "!p[2]p, !s[1]p |- p"] {
        let cost = structured(&pricelog(&["--format", "structured", "cost", s]));
        let sp = structured(&pricelog(&["--format", "structured", "spectrum", s, "--bound", "10"]));
        assert_eq!(cost["cost"], sp["min"], "{s}");
    }
}

#[test]
fn spectrum_lists_every_label() {
    let o = pricelog(&["spectrum", "!p[1]p, !s[0.8]p, !s[0.8]p |- p * p", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), "{1.6, 1.8, 2, 2.6, 2.8, 3}");
}

#[test]
fn semiring_checks_pass() {
    for name in ["cost", "security", "max", "prob"] {
        let o = pricelog(&["check-semiring", "--semiring", name, "--samples", "1000"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("all laws hold"));
    }
}

#[test]
fn semiring_defaults_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_pricelog")).args(["cost", "!p[0.5]p |- p"]).env("PRICELOG_SEMIRING", "prob").output().unwrap();
    assert_eq!(stdout(&o).trim(), "0.5");
}

#[test]
fn encode_ts_decides_reachability() {
    let path = scratch("chain.ts");
    std::fs::write(&path, "states: t1 t2 t3\ntrans: t1 -> t2 : 1.5\ntrans: t2 -> t3 : 1.0\nstart: t1\nend: t3\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(pricelog(&["encode-ts", p, "--budget", "2.5"]).status.code(), Some(0));
    assert_eq!(pricelog(&["encode-ts", p, "--budget", "2.4"]).status.code(), Some(1));
    let v = structured(&pricelog(&["--format", "structured", "encode-ts", p]));
    assert_eq!(v["cost"], "2.5");
    assert_eq!(pricelog(&["encode-ts", "/nonexistent/chain.ts"]).status.code(), Some(2));
}

#[test]
fn cut_combines_two_proof_files() {
    let left = structured(&pricelog(&["--format", "structured", "prove", "!p[2]p |-[2] p"]));
    let right = structured(&pricelog(&["--format", "structured", "prove", "p, !p[3]q |-[3] p * q"]));
    let (p1, p2, out) = (scratch("left.json"), scratch("right.json"), scratch("cut.json"));
    std::fs::write(&p1, left["proof"].to_string()).unwrap();
    std::fs::write(&p2, right["proof"].to_string()).unwrap();
    let o = pricelog(&["cut", p1.to_str().unwrap(), p2.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ProofFile::Labelled { proof, .. } = read_proof(&std::fs::read_to_string(&out).unwrap()).unwrap() else { panic!() };
    check_labelled_proof(&proof, &Builtin::Cost).unwrap();
    assert_eq!(proof.label, CostValue::int(5));
    assert!(proof.count_rule(pricelog_core::RuleName::Ax) > 0);

    let o = pricelog(&["cut", p1.to_str().unwrap(), p2.to_str().unwrap()]);
    assert!(read_proof(&stdout(&o)).is_ok());
}

#[test]
fn play_as_second_player_ends_in_an_engine_win() {
    let o = with_stdin(&["play", RIDDLE, "--budget", "3", "--role", "II"], "0\n1\n1\n");
    let out = stdout(&o);
    assert!(out.contains("player I wins"), "{out}");
    assert_eq!(o.status.code(), Some(1));
    let o = with_stdin(&["--format", "structured", "play", RIDDLE, "--budget", "3", "--role", "II"], "0\n1\n1\n");
    let v = structured(&o);
    assert_eq!(v["outcome"], "won");
    assert_eq!(v["final"]["budget"], "0");
}

#[test]
fn play_aborts_on_end_of_input() {
    let o = with_stdin(&["play", "p & q |- p"], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("aborted"));
}

#[test]
fn play_as_first_player_can_win() {
    let o = with_stdin(&["--format", "structured", "play", "!p[1]p, !s[3]q |- p * q", "--budget", "5"], "trace\n0\n");
    let v = structured(&o);
    assert!(v["narration"].is_array());
    assert_eq!(v["human_won"], v["outcome"] == "won");
}

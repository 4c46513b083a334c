mod common;

use std::process::{Command, Output};

use common::fixture;
use serde_json::Value;

fn f(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn exe(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tracebracket"));
    c.args(args);
    match threads {
        Some(t) => c.env("TRACEBRACKET_THREADS", t),
        None => c.env_remove("TRACEBRACKET_THREADS"),
    };
    c.output().unwrap()
}

fn text(args: &[&str]) -> (i32, String) {
    let o = exe(args, None);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = exe(&full, None);
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn colorings_of_the_trefoil() {
    let args = [&*f("trefoil_pos.dgm"), "alexander(3,1,2)"];
    let (code, out) = text(&["colorings", args[0], args[1]]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("colorings: 9"));
    assert_eq!(out.lines().count(), 10);
    let j = json(&["colorings", args[0], args[1]]);
    assert_eq!(j["command"], "colorings");
    assert_eq!(j["result"]["count"], 9);
    assert_eq!(j["result"]["colorings"].as_array().unwrap().len(), 9);
}

#[test]
fn hopf_invariant_text_and_json() {
    let (d, q, b) = (f("hopf_pos.dgm"), f("bq2.txt"), f("br_z7.txt"));
    for method in ["statesum", "recursive", "parity"] {
        let (code, out) = text(&["invariant", &d, &q, &b, "--method", method]);
        assert_eq!(code, 0);
        assert_eq!(out, "multiset: {1:2, 3:2}\npoly: 2u + 2u^3\n", "{method}");
    }
    let j = json(&["invariant", &d, &q, &b]);
    assert_eq!(j["result"]["poly"], "2u + 2u^3");
    let mut values: Vec<u64> = j["result"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["value"].as_u64().unwrap())
        .collect();
    values.sort();
    assert_eq!(values, vec![1, 1, 3, 3]);
    assert_eq!(j["inputs"]["diagram"], d);
    assert!(j["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn verify_bracket_reports_delta_and_w() {
    let (code, out) = text(&["verify-bracket", &f("bq2.txt"), &f("br_z7.txt")]);
    assert_eq!((code, out.as_str()), (0, "valid\ndelta: 1\nw: 3\n"));
    let j = json(&["verify-bracket", &f("bq2.txt"), &f("br_z7.txt")]);
    assert_eq!((j["result"]["delta"].as_u64(), j["result"]["w"].as_u64()), (Some(1), Some(3)));
    let (code, out) = text(&["verify-bracket", &f("bq3.txt"), &f("br_z7.txt")]);
    assert_eq!(code, 2, "{out}");
}

#[test]
fn classify_labels_match_text_and_json() {
    for (i, label) in [(1, "adequate"), (2, "over"), (3, "under"), (4, "neither")] {
        let br = f(&format!("br_z5_{i}.txt"));
        let (code, out) = text(&["classify", &f("bq3.txt"), &br]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next(), Some(label));
        let j = json(&["classify", &f("bq3.txt"), &br, "--moves"]);
        assert_eq!(j["result"]["class"], label);
        let over = j["result"]["over"].as_bool().unwrap();
        let moves_over = j["result"]["moves"]["over"]["failed"].as_array().unwrap().is_empty();
        assert_eq!(over, moves_over, "br_z5_{i}");
        let under = j["result"]["under"].as_bool().unwrap();
        let moves_under = j["result"]["moves"]["under"]["failed"].as_array().unwrap().is_empty();
        assert_eq!(under, moves_under, "br_z5_{i}");
        let witnesses = j["witnesses"].as_array().unwrap().len();
        assert_eq!(witnesses, [!over, !under, !j["result"]["passthrough"].as_bool().unwrap()].iter().filter(|&&b| b).count());
    }
}

#[test]
fn exit_codes() {
    assert_eq!(text(&["verify-biquandle", &f("bq3.txt")]).0, 0);
    let (code, out) = text(&["verify-biquandle", &f("broken.txt")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("invalid\n"));
    let j = json(&["verify-biquandle", &f("broken.txt")]);
    assert_eq!(j["result"]["valid"], false);
    assert_eq!(j["witnesses"][0]["axiom"], "i");
    let o = exe(&["colorings", &f("bq1.txt"), &f("bq1.txt")], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(exe(&["colorings", "/nonexistent.dgm", "trivial(2)"], None).status.code(), Some(2));
    assert_eq!(exe(&["invariant", &f("hopf_pos.dgm"), &f("broken.txt"), &f("br_z7.txt")], None).status.code(), Some(2));
    assert_eq!(exe(&["no-such-command"], None).status.code(), Some(2));
    assert_eq!(exe(&["--help"], None).status.code(), Some(0));
}

#[test]
fn eval_trace_parity_example() {
    let (p, q, b) = (f("parity_example.trd"), f("bq1.txt"), f("br_generic.txt"));
    let mut outs = Vec::new();
    for method in ["statesum", "recursive", "parity"] {
        let (code, out) = text(&["eval-trace", &p, &q, &b, "--method", method]);
        assert_eq!(code, 0);
        outs.push(out);
    }
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(
        outs[0],
        "crossing 1: odd\ncrossing 2: odd\ncolors 1 1 1 1 1 1: A^-7*B^6 + A^-9*B^8\n"
    );
}

#[test]
fn skein_check_on_the_trefoil() {
    let (code, out) = text(&["skein-check", &f("trefoil_pos.dgm"), &f("bq1.txt"), &f("br_generic.txt")]);
    assert_eq!((code, out.as_str()), (0, "checked: 3\nfailed: 0\nnot applicable: 0\n"));
    let (code, _) = text(&["skein-check", &f("trefoil_pos.dgm"), &f("bq1.txt"), &f("br_generic.txt"), "--crossing", "9"]);
    assert_ne!(code, 0);
}

#[test]
fn search_finds_the_z7_bracket() {
    let j = json(&["search", &f("bq2.txt"), "--mod", "7"]);
    let list = j["result"]["brackets"].as_array().unwrap();
    assert_eq!(j["result"]["count"].as_u64(), Some(list.len() as u64));
    let target: Value = serde_json::json!({ "a": [[1, 6], [4, 1]], "b": [[2, 5], [1, 2]] });
    assert!(list.iter().any(|b| b["a"] == target["a"] && b["b"] == target["b"]));
    let (code, out) = text(&["search", &f("bq2.txt"), "--mod", "7", "--limit", "2"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("found: 2\n"));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let runs: [Vec<String>; 2] = [
        vec!["search".into(), f("bq3.txt"), "--mod".into(), "5".into()],
        vec!["invariant".into(), f("figure_eight.dgm"), f("bq3.txt"), f("br_z5_4.txt")],
    ];
    for args in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let base = exe(&args, None).stdout;
        for t in ["0", "1", "3"] {
            assert_eq!(exe(&args, Some(t)).stdout, base, "{args:?} threads={t}");
        }
        assert_eq!(exe(&args, None).stdout, base);
    }
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["classify", &*f("bq3.txt"), &*f("br_z5_3.txt")];
    let o = tracebracket::cli::run(std::iter::once("tracebracket").chain(args.iter().copied()));
    let bin = exe(&args, None);
    assert_eq!(o.code, bin.status.code().unwrap());
    assert_eq!(o.stdout.as_bytes(), &bin.stdout[..]);
}

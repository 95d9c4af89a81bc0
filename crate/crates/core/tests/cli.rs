use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use splprio::fixtures::vending_machine_dir;

fn splprio(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_splprio")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn dir() -> String {
    vending_machine_dir().display().to_string()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("JSON output")
}

/// Copies the fixtures into `to`, replacing the usage model with `um`.
fn models_with_usage(to: &Path, um: &str) {
    for f in ["fd.json", "fts.json"] {
        fs::copy(vending_machine_dir().join(f), to.join(f)).unwrap();
    }
    fs::write(to.join("um.json"), um).unwrap();
}

#[test]
fn validate_accepts_the_fixtures() {
    let (code, out, _) = splprio(&["validate", "--models", &dir()]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn validate_reports_unknown_actions() {
    let tmp = tempfile::tempdir().unwrap();
    let um = fs::read_to_string(vending_machine_dir().join("um.json")).unwrap();
    let mut doc = json(&um);
    doc["transitions"][0]["action"] = "soda2".into();
    models_with_usage(tmp.path(), &doc.to_string());
    let (code, out, _) = splprio(&["validate", "--models", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let report = json(&out);
    assert_eq!(report["valid"], false);
    assert!(report["violations"].as_array().unwrap().iter().any(|v| v["code"] == "ACT_NOT_SUBSET"));
}

#[test]
fn missing_or_malformed_input_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(splprio(&["validate", "--models", tmp.path().to_str().unwrap()]).0, 2);
    models_with_usage(tmp.path(), "{ not json");
    assert_eq!(splprio(&["validate", "--models", tmp.path().to_str().unwrap()]).0, 2);
}

#[test]
fn prioritize_ranks_the_three_legal_traces() {
    let (code, out, _) = splprio(&["prioritize", "--models", &dir(), "--lmax", "7", "--pmin", "0", "--pmax", "0.1"]);
    assert_eq!(code, 0);
    let doc = json(&out);
    assert_eq!(doc["order"], "DESC");
    let entries = doc["entries"].as_array().unwrap();
    let probs: Vec<f64> = entries.iter().map(|e| e["probability"].as_f64().unwrap()).collect();
    assert_eq!(probs, [0.09, 0.01, 0.009]);
    let last = entries.last().unwrap();
    assert_eq!(last["trace"], serde_json::json!(["pay", "change", "tea", "serveTea", "open", "take", "close"]));
    assert_eq!(last["guard"], "!f && t");
    assert_eq!(last["products"].as_array().unwrap().len(), 8);
}

#[test]
fn ascending_order_reverses_the_report() {
    let (_, out, _) = splprio(&[
        "prioritize", "--models", &dir(), "--lmax", "7", "--pmax", "0.1", "--order", "ASC",
    ]);
    let probs: Vec<f64> =
        json(&out)["entries"].as_array().unwrap().iter().map(|e| e["probability"].as_f64().unwrap()).collect();
    assert_eq!(probs, [0.009, 0.01, 0.09]);
}

#[test]
fn high_interval_keeps_the_free_tea_trace() {
    let (code, out, _) = splprio(&["prioritize", "--models", &dir(), "--lmax", "7", "--pmin", "0.5", "--pmax", "1"]);
    assert_eq!(code, 0);
    let doc = json(&out);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["guard"], "f && t");
    assert_eq!(entries[0]["products"].as_array().unwrap().len(), 8);
    assert_eq!(entries[0]["probability"], 0.729);
}

#[test]
fn no_surviving_trace_exits_one() {
    let (code, out, _) = splprio(&["prioritize", "--models", &dir(), "--lmax", "2", "--pmax", "0.1"]);
    assert_eq!(code, 1);
    assert!(json(&out)["entries"].as_array().unwrap().is_empty());
}

#[test]
fn bad_parameters_exit_two() {
    let d = dir();
    assert_eq!(splprio(&["traces", "--models", &d, "--lmax", "0"]).0, 2);
    assert_eq!(splprio(&["traces", "--models", &d, "--lmax", "7", "--pmin", "-0.1"]).0, 2);
    assert_eq!(splprio(&["product-tests", "--models", &d, "--product", "v,b,cur,t,eur", "--count", "0"]).0, 2);
}

#[test]
fn emit_fts_prime_writes_the_pruned_fts() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("prime.json");
    let (code, _, _) = splprio(&[
        "prioritize", "--models", &dir(), "--lmax", "7", "--pmax", "0.1",
        "--emit-fts-prime", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let prime = json(&fs::read_to_string(&path).unwrap());
    let actions: Vec<&str> =
        prime["transitions"].as_array().unwrap().iter().map(|t| t["action"].as_str().unwrap()).collect();
    assert_eq!(actions.len(), 10);
    assert!(!actions.contains(&"soda") && !actions.contains(&"serveSoda"));
}

#[test]
fn out_flag_writes_to_a_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("traces.json");
    let (code, out, _) =
        splprio(&["traces", "--models", &dir(), "--lmax", "7", "--pmax", "0.1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(json(&fs::read_to_string(path).unwrap())["traces"].as_array().unwrap().len(), 5);
}

#[test]
fn product_tests_are_reproducible() {
    let args = ["product-tests", "--models", &dir(), "--product", "v,b,cur,t,c,eur,f", "--seed", "42", "--count", "10"];
    let (code, first, _) = splprio(&args);
    assert_eq!(code, 0);
    assert_eq!(first, splprio(&args).1);
    let doc = json(&first);
    assert_eq!(doc["seed"], 42);
    assert_eq!(doc["cases"].as_array().unwrap().len(), 10);
    for case in doc["cases"].as_array().unwrap() {
        assert_eq!(case[0], "free");
    }
}

#[test]
fn product_tests_domain_failures_exit_one() {
    let d = dir();
    let (code, _, err) = splprio(&["product-tests", "--models", &d, "--product", "v,b,s,t"]);
    assert_eq!(code, 1);
    assert!(err.contains("INVALID_PRODUCT"), "{err}");
    // no free drinks, no cancel and no tea: state 3 has nowhere to go
    let (code, _, err) = splprio(&["product-tests", "--models", &d, "--product", "v,b,cur,s,eur"]);
    assert_eq!(code, 1);
    assert!(err.contains("INITIAL_DEAD"), "{err}");
}

#[test]
fn prioritize_refuses_an_invalid_triple() {
    let tmp = tempfile::tempdir().unwrap();
    let um = fs::read_to_string(vending_machine_dir().join("um.json")).unwrap();
    let mut doc = json(&um);
    doc["transitions"][0]["p"] = 0.85.into();
    models_with_usage(tmp.path(), &doc.to_string());
    let (code, out, _) = splprio(&["prioritize", "--models", tmp.path().to_str().unwrap(), "--lmax", "7"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["valid"], false);
}

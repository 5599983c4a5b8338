use std::fs;
use std::path::PathBuf;
use std::process::Command;

use agentcheck_cli::{run, CHECK_JSON_KEYS, EXIT_FALSE, EXIT_INPUT, EXIT_TRUE, TRACE_JSON_KEYS};
use agentcheck_core::samples::{K1, M1};
use serde_json::Value;
use tempfile::TempDir;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(dir.path().join("m1.cgs"), M1).unwrap();
        fs::write(dir.path().join("k1.kripke"), K1).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) -> String {
        fs::write(self.dir.path().join(name), text).unwrap();
        self.path(name)
    }
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("agentcheck").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_verdicts_on_m1() {
    let fx = Fixture::new();
    let m1 = fx.path("m1.cgs");
    let (code, out, _) = call(&["check", &m1, "--formula", "<A0,A1> F goal"]);
    assert_eq!(code, EXIT_TRUE);
    assert_eq!(out.lines().next(), Some("true"));
    assert!(out.contains("S0: true"));
    assert!(out.contains("method: Explicit"));
    assert!(out.contains("elapsed:"));

    let (code, out, _) = call(&["check", &m1, "--formula", "<A0> F goal"]);
    assert_eq!(code, EXIT_FALSE);
    assert_eq!(out.lines().next(), Some("false"));
}

#[test]
fn classify_reports_both_classes() {
    let fx = Fixture::new();
    let (code, out, _) = call(&["classify", &fx.path("m1.cgs"), "--formula", "E F goal"]);
    assert_eq!(code, EXIT_TRUE);
    assert_eq!(out.trim(), "model: CGS, logic: CTL");
    let (_, out, _) = call(&["classify", &fx.path("k1.kripke")]);
    assert_eq!(out.trim(), "model: Kripke");
}

#[test]
fn input_errors_exit_two() {
    let fx = Fixture::new();
    let m1 = fx.path("m1.cgs");
    for args in [
        vec!["check", m1.as_str(), "--formula", "<A0,A1> F missing_atom"],
        vec!["check", m1.as_str(), "--formula", "<A0> F"],
        vec!["check", "/nonexistent/model.cgs", "--formula", "true"],
        vec!["check", m1.as_str()],
        vec!["check", m1.as_str(), "--formula", "p", "--explicit-max", "100"],
        vec!["graph", m1.as_str(), "--formula", "p"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, EXIT_INPUT, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn json_output_has_stable_keys() {
    let fx = Fixture::new();
    let m1 = fx.path("m1.cgs");
    for formula in ["<A0,A1> F goal", "<A1> F goal", "E G !goal"] {
        let (_, out, _) = call(&["check", &m1, "--formula", formula, "--json"]);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, CHECK_JSON_KEYS);
        let trace: Vec<&str> = v["trace"].as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(trace, TRACE_JSON_KEYS);
        assert!(v["overall"].is_boolean());
        assert!(v["per_initial"]["S0"].is_boolean());
        assert!(v["elapsed_ms"].is_number());
    }
}

#[test]
fn method_override_records_policy_preference() {
    let fx = Fixture::new();
    let m1 = fx.path("m1.cgs");
    let (code, out, _) = call(&[
        "check", &m1, "--formula", "<A0,A1> F goal", "--json", "--method", "explicit",
        "--explicit-max", "2", "--implicit-max", "3",
    ]);
    assert_eq!(code, EXIT_TRUE);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["trace"]["preferred_method"], "Abstract");
    assert_eq!(v["trace"]["used_method"], "Explicit");
    assert_eq!(v["trace"]["fallback_applied"], true);
}

#[test]
fn formula_may_come_from_a_file() {
    let fx = Fixture::new();
    let f = fx.write("goal.atl", "<A0,A1> F goal\n");
    let (code, _, _) = call(&["check", &fx.path("m1.cgs"), "--formula-file", &f]);
    assert_eq!(code, EXIT_TRUE);
}

#[test]
fn validate_reports_every_violation() {
    let fx = Fixture::new();
    let (code, out, _) = call(&["validate", &fx.path("m1.cgs")]);
    assert_eq!((code, out.trim()), (EXIT_TRUE, "OK"));

    let broken = M1.replace("Transition: S1 A C -> S3", "Transition: S1 B C -> S3");
    let bad = fx.write("bad.cgs", &broken);
    let (code, _, err) = call(&["validate", &bad]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("product-closure"), "{err}");

    let (code, out, _) = call(&["validate", &bad, "--json"]);
    assert_eq!(code, EXIT_INPUT);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["code"], "validation_error");
    assert!(!v["violations"].as_array().unwrap().is_empty());

    let garbled = fx.write("garbled.cgs", "ModelType: CGS\nAgents A0\n");
    let (_, out, _) = call(&["validate", &garbled, "--json"]);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["code"], "parse_error");
    assert_eq!(v["line"], 2);
}

#[test]
fn graph_writes_dot() {
    let fx = Fixture::new();
    let (code, out, _) = call(&["graph", &fx.path("m1.cgs")]);
    assert_eq!(code, EXIT_TRUE);
    assert!(out.starts_with("digraph"));
    assert_eq!(out.matches(" -> ").count(), 10);

    let target = fx.path("m1.dot");
    let (code, out, _) = call(&["graph", &fx.path("m1.cgs"), "--out", &target]);
    assert_eq!(code, EXIT_TRUE);
    assert!(out.is_empty());
    assert!(fs::read_to_string(&target).unwrap().starts_with("digraph"));
}

#[test]
fn binary_exit_codes() {
    let fx = Fixture::new();
    let m1 = fx.path("m1.cgs");
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_agentcheck"));
    for (formula, code, first) in [
        ("<A0,A1> F goal", 0, "true"),
        ("<A0> F goal", 1, "false"),
        ("<A0,A1> F missing_atom", 2, ""),
    ] {
        let o = Command::new(&bin).args(["check", &m1, "--formula", formula]).output().unwrap();
        assert_eq!(o.status.code(), Some(code), "{formula}");
        assert_eq!(String::from_utf8_lossy(&o.stdout).lines().next().unwrap_or(""), first);
    }
}

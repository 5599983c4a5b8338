use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use agentcheck_core::kernel::SelectionPolicy;
use agentcheck_core::models::{parse_model_text, serialize_model};
use agentcheck_core::samples::M1;
use agentcheck_service::store::SessionStore;
use agentcheck_service::{router, AppState};
use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(AppState::new(
        SessionStore::in_memory(Duration::from_secs(3600)),
        SelectionPolicy::default(),
    ))
}

struct Reply {
    status: StatusCode,
    content_type: Option<String>,
    text: String,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header(header::CONTENT_TYPE, "application/json");
    }
    let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let content_type = res
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        text: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None).await
}

async fn post(app: &Router, uri: &str, body: Value) -> Reply {
    call(app, Method::POST, uri, Some(body.to_string())).await
}

async fn new_session(app: &Router) -> String {
    let r = call(app, Method::POST, "/sessions", None).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let v = r.json();
    assert_eq!(v["phase"], "Agents");
    v["id"].as_str().unwrap().to_string()
}

async fn step(app: &Router, id: &str, kind: &str, payload: Value) -> Reply {
    post(app, &format!("/sessions/{id}/step"), json!({ "kind": kind, "payload": payload })).await
}

async fn ok_step(app: &Router, id: &str, kind: &str, payload: Value) -> Value {
    let r = step(app, id, kind, payload).await;
    assert_eq!(r.status, StatusCode::OK, "{kind}: {}", r.text);
    r.json()
}

fn m1_rows() -> Vec<Value> {
    [
        ("S0", ["A", "A"], "S1"),
        ("S0", ["A", "B"], "S0"),
        ("S0", ["B", "A"], "S0"),
        ("S0", ["B", "B"], "S2"),
        ("S1", ["A", "A"], "S2"),
        ("S1", ["A", "B"], "S3"),
        ("S1", ["A", "C"], "S3"),
        ("S2", ["A", "A"], "S3"),
        ("S2", ["B", "A"], "S0"),
        ("S3", ["A", "A"], "S3"),
    ]
    .iter()
    .map(|(s, j, t)| json!({ "state": s, "joint": j, "target": t }))
    .collect()
}

fn m1_protocol() -> Value {
    json!({
        "S0": { "A0": ["A", "B"], "A1": ["A", "B"] },
        "S1": { "A0": ["A"], "A1": ["A", "B", "C"] },
        "S2": { "A0": ["A", "B"], "A1": ["A"] },
        "S3": { "A0": ["A"], "A1": ["A"] },
    })
}

/// Drives a session through Agents, States and Actions for M1.
async fn m1_up_to_transitions(app: &Router) -> String {
    let id = new_session(app).await;
    ok_step(app, &id, "agents", json!({ "agents": ["A0", "A1"] })).await;
    ok_step(
        app,
        &id,
        "states",
        json!({
            "states": ["S0", "S1", "S2", "S3"],
            "initial": ["S0"],
            "atoms": ["goal"],
            "labels": { "S3": ["goal"] },
        }),
    )
    .await;
    let v = ok_step(app, &id, "actions", json!({ "actions": { "A0": ["A", "B"], "A1": ["A", "B", "C"] } })).await;
    assert_eq!(v["phase"], "Transitions");
    id
}

async fn m1_up_to_formula(app: &Router) -> String {
    let id = m1_up_to_transitions(app).await;
    let v = ok_step(app, &id, "transitions", json!({ "rows": m1_rows() })).await;
    assert_eq!(v["phase"], "Review");
    let v = ok_step(app, &id, "review", json!({ "confirm": true })).await;
    assert_eq!(v["phase"], "Formula");
    id
}

#[tokio::test]
async fn wizard_replay_of_m1_matches_canonical_text_and_verifies() {
    let app = app();
    let id = m1_up_to_formula(&app).await;
    let view = get(&app, &format!("/sessions/{id}")).await.json();
    let canonical = serialize_model(&parse_model_text(M1).unwrap());
    assert_eq!(view["model_text"].as_str().unwrap(), canonical);

    let v = ok_step(&app, &id, "formula", json!({ "formula": "<A0,A1> F goal" })).await;
    assert_eq!(v["phase"], "Done");
    let r = get(&app, &format!("/sessions/{id}/result")).await;
    assert_eq!(r.status, StatusCode::OK);
    let result = r.json();
    assert_eq!(result["overall"], true);
    assert_eq!(result["per_initial"]["S0"], true);
    assert_eq!(result["model_class"], "CGS");
    assert_eq!(result["logic_class"], "ATL");
    assert!(result["witness"].is_object());
}

#[tokio::test]
async fn missing_joint_vector_is_reported() {
    let app = app();
    let id = m1_up_to_transitions(&app).await;
    let rows: Vec<Value> = m1_rows()
        .into_iter()
        .filter(|r| !(r["state"] == "S1" && r["joint"] == json!(["A", "C"])))
        .collect();
    let r = step(&app, &id, "transitions", json!({ "rows": rows, "protocol": m1_protocol() })).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let e = r.json();
    assert_eq!(e["code"], "validation_error");
    assert_eq!(e["missing_vectors"], json!([{ "state": "S1", "joint": ["A", "C"] }]));

    let view = get(&app, &format!("/sessions/{id}")).await.json();
    assert_eq!(view["phase"], "Transitions");
    let pending: Vec<&Value> = view["joint_vectors"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["target"].is_null())
        .collect();
    assert_eq!(pending.len(), 24, "nothing was committed by the failed step");

    let fix = json!([{ "state": "S1", "joint": ["A", "C"], "target": "S3" }]);
    let partial = ok_step(&app, &id, "transitions", json!({ "rows": rows, "complete": false, "protocol": m1_protocol() })).await;
    assert_eq!(partial["phase"], "Transitions");
    let v = ok_step(&app, &id, "transitions", json!({ "rows": fix })).await;
    assert_eq!(v["phase"], "Review");
}

#[tokio::test]
async fn out_of_order_steps_are_phase_mismatches() {
    let app = app();
    let id = new_session(&app).await;
    let r = step(&app, &id, "formula", json!({ "formula": "goal" })).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "phase_mismatch");
    let r = step(&app, &id, "states", json!({ "states": ["S0"], "initial": ["S0"] })).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn graph_is_available_from_review() {
    let app = app();
    let id = m1_up_to_transitions(&app).await;
    let r = get(&app, &format!("/sessions/{id}/graph")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    ok_step(&app, &id, "transitions", json!({ "rows": m1_rows() })).await;
    let r = get(&app, &format!("/sessions/{id}/graph")).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.content_type.as_deref(), Some("text/vnd.graphviz"));
    assert!(r.text.starts_with("digraph"));
    for s in ["S0", "S1", "S2", "S3"] {
        assert!(r.text.contains(&format!("\"{s}\" [")), "{s} missing in {}", r.text);
    }
}

#[tokio::test]
async fn result_before_formula_is_a_conflict() {
    let app = app();
    let id = m1_up_to_transitions(&app).await;
    let r = get(&app, &format!("/sessions/{id}/result")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "phase_mismatch");
}

#[tokio::test]
async fn one_shot_verify() {
    let app = app();
    let r = post(&app, "/verify", json!({ "model": M1, "formula": "<A1> F goal" })).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text);
    let v = r.json();
    assert_eq!(v["overall"], false);
    assert_eq!(v["method"], "Explicit");
    assert_eq!(v["trace"]["state_count"], 4);

    let r = post(&app, "/verify", json!({ "model": M1, "formula": "<A0> F" })).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let e = r.json();
    assert_eq!(e["code"], "formula_parse_error");
    assert!(e["column"].is_u64());

    let r = post(&app, "/verify", json!({ "model": M1, "formula": "<A0> F win" })).await;
    assert_eq!(r.json()["code"], "unknown_atom");
    let r = post(&app, "/verify", json!({ "model": M1, "formula": "<A7> F goal" })).await;
    assert_eq!(r.json()["code"], "unknown_agent");

    let r = post(&app, "/verify", json!({ "model": "ModelType: CGS\nAgents: A0\nBogus", "formula": "goal" })).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let e = r.json();
    assert_eq!(e["code"], "parse_error");
    assert!(e["line"].is_u64());

    let r = post(&app, "/verify", json!({ "model": M1 })).await;
    assert_eq!(r.json()["code"], "invalid_payload");
}

#[tokio::test]
async fn verify_honours_policy_in_the_trace() {
    let app = app();
    let body = json!({
        "model": M1,
        "formula": "<A0,A1> F goal",
        "policy": { "explicit_max_states": 2, "implicit_max_states": 3 },
    });
    let v = post(&app, "/verify", body).await.json();
    assert_eq!(v["trace"]["preferred_method"], "Abstract");
    assert_eq!(v["trace"]["used_method"], "Explicit");
    assert_eq!(v["trace"]["fallback_applied"], true);
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let app = app();
    for uri in ["/sessions/nope", "/sessions/nope/graph", "/sessions/nope/result"] {
        let r = get(&app, uri).await;
        assert_eq!(r.status, StatusCode::NOT_FOUND, "{uri}");
        assert_eq!(r.json()["code"], "not_found");
    }
    let r = step(&app, "nope", "agents", json!({ "agents": ["A"] })).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn back_edit_truncates_later_content() {
    let app = app();
    let id = m1_up_to_formula(&app).await;
    ok_step(&app, &id, "formula", json!({ "formula": "<A0,A1> F goal" })).await;

    let v = ok_step(&app, &id, "states", json!({ "states": ["S0", "S1"], "initial": ["S0"] })).await;
    assert_eq!(v["phase"], "Actions");
    assert_eq!(v["draft"]["agents"], json!(["A0", "A1"]));
    assert_eq!(v["draft"]["actions"], json!({}));
    assert_eq!(v["draft"]["transitions"], json!([]));
    assert!(v["formula"].is_null());
    let kinds: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["agents", "states"]);
    let r = get(&app, &format!("/sessions/{id}/result")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn back_step_keeps_target_content() {
    let app = app();
    let id = m1_up_to_formula(&app).await;
    let v = ok_step(&app, &id, "back", json!({ "to": "Transitions" })).await;
    assert_eq!(v["phase"], "Transitions");
    assert_eq!(v["draft"]["transitions"].as_array().unwrap().len(), 10);
    assert!(v["joint_vectors"].is_array());
    let v = ok_step(&app, &id, "transitions", json!({ "rows": [] })).await;
    assert_eq!(v["phase"], "Review");
}

#[tokio::test]
async fn invalid_payloads_and_names() {
    let app = app();
    let id = new_session(&app).await;
    let r = call(&app, Method::POST, &format!("/sessions/{id}/step"), Some("{not json".into())).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "invalid_payload");
    let r = step(&app, &id, "agents", json!({ "agentz": ["A"] })).await;
    assert_eq!(r.json()["code"], "invalid_payload");
    let r = step(&app, &id, "agents", json!({ "agents": ["A0", "A0", "X"] })).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let e = r.json();
    assert_eq!(e["code"], "validation_error");
    assert!(!e["violations"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn a_failed_check_returns_to_the_formula_phase() {
    let app = app();
    let id = m1_up_to_formula(&app).await;
    let r = step(&app, &id, "formula", json!({ "formula": "<A0> F nothing" })).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "unknown_atom");
    let view = get(&app, &format!("/sessions/{id}")).await.json();
    assert_eq!(view["phase"], "Formula");
    ok_step(&app, &id, "formula", json!({ "formula": "E F goal" })).await;
}

#[tokio::test]
async fn session_ids_are_distinct() {
    let app = app();
    let mut ids = std::collections::HashSet::new();
    for _ in 0..20 {
        assert!(ids.insert(new_session(&app).await));
    }
}

#[tokio::test]
async fn sessions_persist_across_restarts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.json");
    let open = || {
        router(AppState::new(
            SessionStore::open(&path, Duration::from_secs(3600)).unwrap(),
            SelectionPolicy::default(),
        ))
    };
    let id = {
        let app = open();
        m1_up_to_formula(&app).await
    };
    let app = open();
    let view = get(&app, &format!("/sessions/{id}")).await.json();
    assert_eq!(view["phase"], "Formula");
    let v = ok_step(&app, &id, "formula", json!({ "formula": "<A0,A1> F goal" })).await;
    assert_eq!(v["result"]["overall"], true);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let now = Arc::new(AtomicU64::new(10_000));
    let clock = now.clone();
    let store = SessionStore::in_memory(Duration::from_secs(60))
        .with_clock(Arc::new(move || clock.load(Ordering::SeqCst)));
    let app = router(AppState::new(store, SelectionPolicy::default()));
    let id = new_session(&app).await;
    now.store(10_050, Ordering::SeqCst);
    ok_step(&app, &id, "agents", json!({ "agents": ["A0"] })).await;
    now.store(10_100, Ordering::SeqCst);
    assert_eq!(get(&app, &format!("/sessions/{id}")).await.status, StatusCode::OK);
    now.store(10_200, Ordering::SeqCst);
    assert_eq!(get(&app, &format!("/sessions/{id}")).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn concurrent_mutation_is_a_conflict() {
    let state = AppState::new(SessionStore::in_memory(Duration::from_secs(60)), SelectionPolicy::default());
    let app = router(state.clone());
    let id = new_session(&app).await;
    state.store.begin(&id).unwrap();
    let r = step(&app, &id, "agents", json!({ "agents": ["A0"] })).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "conflict");
    state.store.finish(&id, None).unwrap();
    ok_step(&app, &id, "agents", json!({ "agents": ["A0"] })).await;
}

#[tokio::test]
async fn parse_endpoint_and_registry() {
    let app = app();
    let v = post(&app, "/parse/formula", json!({ "formula": "<A0,A1> (p U q)" })).await.json();
    assert_eq!(v["logic_class"], "ATL");
    assert_eq!(v["atoms"], json!(["p", "q"]));
    assert_eq!(v["agents"], json!(["A0", "A1"]));
    let canonical = v["canonical"].as_str().unwrap().to_string();
    let again = post(&app, "/parse/formula", json!({ "formula": canonical })).await.json();
    assert_eq!(again["canonical"], v["canonical"]);

    let r = post(&app, "/parse/formula", json!({ "formula": "E (p U" })).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "formula_parse_error");

    let reg = get(&app, "/meta/registry").await.json();
    let checkers = reg["checkers"].as_array().unwrap();
    assert_eq!(checkers.len(), 2);
    assert!(checkers.iter().any(|c| c["model_class"] == "CGS" && c["logic_class"] == "ATL"));
    assert_eq!(reg["policy"]["explicit_max_states"], 50);
    assert!(reg["model_classes"].as_array().unwrap().iter().any(|c| c["id"] == "Kripke"));
}

/// Replays the recorded steps of `id` through a fresh session.
async fn replay(app: &Router, id: &str) -> Value {
    let view = get(app, &format!("/sessions/{id}")).await.json();
    let fresh = new_session(app).await;
    for s in view["steps"].as_array().unwrap() {
        let r = post(app, &format!("/sessions/{fresh}/step"), s.clone()).await;
        assert_eq!(r.status, StatusCode::OK, "{s}: {}", r.text);
    }
    let again = get(app, &format!("/sessions/{fresh}")).await.json();
    assert_eq!(again["model_text"], view["model_text"]);
    assert_eq!(again["draft"], view["draft"]);
    again
}

#[tokio::test]
async fn recorded_steps_replay_to_the_same_model() {
    let app = app();
    let id = m1_up_to_transitions(&app).await;
    let rows = m1_rows();
    let (first, rest) = rows.split_at(4);
    ok_step(&app, &id, "transitions", json!({ "rows": first, "complete": false })).await;
    ok_step(&app, &id, "transitions", json!({ "rows": rest })).await;
    ok_step(&app, &id, "review", json!({ "confirm": true })).await;
    ok_step(&app, &id, "formula", json!({ "formula": "<A0,A1> F goal" })).await;
    let again = replay(&app, &id).await;
    assert_eq!(again["phase"], "Done");
    assert_eq!(again["result"]["overall"], true);

    ok_step(&app, &id, "back", json!({ "to": "Transitions" })).await;
    let loop_row = json!([{ "state": "S3", "joint": ["A", "A"], "target": "S0" }]);
    ok_step(&app, &id, "transitions", json!({ "rows": loop_row })).await;
    ok_step(&app, &id, "review", json!({ "confirm": true })).await;
    let again = replay(&app, &id).await;
    assert_eq!(again["phase"], "Formula");
    assert!(again["model_text"].as_str().unwrap().contains("Transition: S3 A A -> S0"));
}

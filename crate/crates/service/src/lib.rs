//! HTTP/JSON service: wizard sessions that build a CGS step by step, plus a
//! one-shot `/verify` endpoint.
//!
//! | Method | Path | |
//! |---|---|---|
//! | POST | `/sessions` | new session, `201 {id, phase}` |
//! | GET | `/sessions/{id}` | session view |
//! | POST | `/sessions/{id}/step` | submit `{kind, payload}` |
//! | GET | `/sessions/{id}/graph` | DOT export, from Review on |
//! | GET | `/sessions/{id}/result` | last verification result |
//! | POST | `/verify` | `{model, formula, policy?, method?}` |
//! | POST | `/parse/formula` | `{formula}` |
//! | GET | `/meta/registry` | classes and checkers |

pub mod config;
pub mod error;
pub mod session;
pub mod store;

use std::sync::Arc;

use agentcheck_core::kernel::{
    classify_formula, verify_with, Method, Registry, SelectionPolicy, VerifyOptions,
};
use agentcheck_core::logics::{agents_of, atoms_of, parse_formula};
use agentcheck_core::models::export_dot;
use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use config::ServiceConfig;
pub use error::ApiError;
use session::{Draft, JointEntry, Phase, Step, StepError};
use store::{Session, SessionStore};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub registry: Arc<Registry>,
    pub policy: SelectionPolicy,
}

impl AppState {
    pub fn new(store: SessionStore, policy: SelectionPolicy) -> Self {
        Self {
            store: Arc::new(store),
            registry: Arc::new(Registry::standard()),
            policy,
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/step", post(post_step))
        .route("/sessions/{id}/graph", get(get_graph))
        .route("/sessions/{id}/result", get(get_result))
        .route("/verify", post(post_verify))
        .route("/parse/formula", post(post_parse_formula))
        .route("/meta/registry", get(get_registry))
        .with_state(state)
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request("invalid_payload", e.to_string()))
}

#[derive(Serialize)]
struct SessionView<'a> {
    id: &'a str,
    phase: Phase,
    created: u64,
    updated: u64,
    draft: &'a Draft,
    steps: &'a [Step],
    formula: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    joint_vectors: Option<Vec<JointEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a Value>,
}

fn view(s: &Session) -> Value {
    let w = &s.wizard;
    let v = SessionView {
        id: &s.id,
        phase: w.phase,
        created: s.created,
        updated: s.updated,
        draft: &w.draft,
        steps: &w.steps,
        formula: w.formula.as_deref(),
        model_text: w.model_text(),
        joint_vectors: (w.phase == Phase::Transitions).then(|| w.draft.joint_table()),
        result: w.last_result.as_ref(),
    };
    serde_json::to_value(v).unwrap_or(Value::Null)
}

async fn create_session(State(st): State<AppState>) -> Result<Response, ApiError> {
    let s = st.store.create()?;
    Ok((StatusCode::CREATED, Json(json!({ "id": s.id, "phase": s.wizard.phase }))).into_response())
}

async fn get_session(State(st): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(view(&st.store.get(&id)?)))
}

async fn post_step(
    State(st): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<Json<Value>, ApiError> {
    let step: Step = body(&bytes)?;
    let mut session = st.store.begin(&id)?;
    let outcome = advance(&st, &mut session, &step).await;
    match outcome {
        Ok(()) => {
            st.store.finish(&id, Some(session.clone()))?;
            Ok(Json(view(&session)))
        }
        Err((e, keep)) => {
            st.store.finish(&id, keep.then_some(session))?;
            Err(e)
        }
    }
}

/// Applies `step`, running a verification when it is a Formula step. On
/// error, the flag says whether `session` changed and must be stored.
async fn advance(st: &AppState, session: &mut Session, step: &Step) -> Result<(), (ApiError, bool)> {
    let pending = session.wizard.apply(step).map_err(|e| (e.into(), false))?;
    let Some(pending) = pending else {
        return Ok(());
    };
    st.store.stage(session.clone()).map_err(|e| (e.into(), false))?;
    let registry = st.registry.clone();
    let options = VerifyOptions::from(st.policy);
    let outcome = tokio::task::spawn_blocking(move || session::run_check(&registry, &pending, &options))
        .await
        .unwrap_or_else(|e| {
            Err(StepError::Internal(format!("verification task failed: {e}")))
        });
    session.wizard.finish(outcome).map_err(|e| (e.into(), true))
}

async fn get_graph(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.store.get(&id)?;
    let doc = s
        .wizard
        .document()
        .ok_or_else(|| ApiError::phase_mismatch(format!("no graph before Review (phase {:?})", s.wizard.phase)))?;
    Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz")], export_dot(&doc)).into_response())
}

async fn get_result(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.store.get(&id)?;
    match (s.wizard.phase, &s.wizard.last_result) {
        (Phase::Done, Some(r)) => Ok(Json(r.clone()).into_response()),
        (Phase::Verifying, _) => Ok((StatusCode::ACCEPTED, Json(json!({ "phase": Phase::Verifying }))).into_response()),
        (phase, _) => Err(ApiError::phase_mismatch(format!("no result in phase {phase:?}"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyBody {
    explicit_max_states: usize,
    implicit_max_states: usize,
}

#[derive(Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum MethodBody {
    Explicit,
    Auto,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyBody {
    model: String,
    formula: String,
    #[serde(default)]
    policy: Option<PolicyBody>,
    #[serde(default)]
    method: Option<MethodBody>,
}

async fn post_verify(State(st): State<AppState>, bytes: Bytes) -> Result<Json<Value>, ApiError> {
    let req: VerifyBody = body(&bytes)?;
    let policy = match req.policy {
        Some(p) => SelectionPolicy::new(p.explicit_max_states, p.implicit_max_states)
            .map_err(|e| ApiError::bad_request("invalid_payload", e.to_string()))?,
        None => st.policy,
    };
    let options = VerifyOptions {
        policy,
        method: (req.method == Some(MethodBody::Explicit)).then_some(Method::Explicit),
    };
    let registry = st.registry.clone();
    let result = tokio::task::spawn_blocking(move || verify_with(&registry, &req.model, &req.formula, &options))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal_error", e.to_string()))??;
    serde_json::to_value(&result)
        .map(Json)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal_error", e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseBody {
    formula: String,
}

async fn post_parse_formula(bytes: Bytes) -> Result<Json<Value>, ApiError> {
    let req: ParseBody = body(&bytes)?;
    let f = parse_formula(&req.formula)?;
    Ok(Json(json!({
        "canonical": f.to_string(),
        "logic_class": classify_formula(&f),
        "atoms": atoms_of(&f),
        "agents": agents_of(&f),
    })))
}

async fn get_registry(State(st): State<AppState>) -> Json<Value> {
    let models: Vec<Value> = st
        .registry
        .model_classes()
        .iter()
        .map(|c| json!({ "id": c, "branch": c.branch() }))
        .collect();
    let logics: Vec<Value> = st
        .registry
        .logic_classes()
        .iter()
        .map(|c| json!({ "id": c, "branch": c.branch() }))
        .collect();
    Json(json!({
        "model_classes": models,
        "logic_classes": logics,
        "checkers": st.registry.checkers(),
        "policy": st.policy,
    }))
}

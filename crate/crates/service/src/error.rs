use agentcheck_core::kernel::VerifyError;
use agentcheck_core::logics::FormulaParseError;
use agentcheck_core::models::{ModelError, Violation};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use crate::session::{MissingVector, StepError};
use crate::store::StoreError;

/// JSON error body: `{code, message, line?, column?, missing_vectors?, ...}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(flatten)]
    pub details: Box<Details>,
}

/// Optional fields, present only when they apply.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Details {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing_vectors: Option<Vec<MissingVector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<Violation>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<String>>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            details: Box::default(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn phase_mismatch(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "phase_mismatch", message)
    }

    fn with_violations(mut self, violations: Vec<Violation>, missing: Vec<MissingVector>) -> Self {
        if !missing.is_empty() {
            self.details.missing_vectors = Some(missing);
        }
        if !violations.is_empty() {
            self.details.violations = Some(violations);
        }
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<FormulaParseError> for ApiError {
    fn from(e: FormulaParseError) -> Self {
        let mut out = Self::bad_request("formula_parse_error", e.to_string());
        out.details.line = Some(1);
        out.details.column = Some(e.column);
        out.details.expected = Some(e.expected);
        out
    }
}

impl From<VerifyError> for ApiError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Formula(f) => f.into(),
            VerifyError::Model(ModelError::Parse { line, column, .. }) => {
                let mut out = Self::bad_request("parse_error", e.to_string());
                out.details.line = Some(line);
                out.details.column = Some(column);
                out
            }
            VerifyError::Model(ModelError::Validation(ref errs)) => {
                let missing = errs
                    .missing_vectors()
                    .into_iter()
                    .map(|(state, joint)| MissingVector { state, joint })
                    .collect();
                let violations = errs.0.clone();
                Self::bad_request("validation_error", e.to_string()).with_violations(violations, missing)
            }
            e if e.is_input_error() => Self::bad_request(e.code(), e.to_string()),
            e => Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), e.to_string()),
        }
    }
}

impl From<StepError> for ApiError {
    fn from(e: StepError) -> Self {
        match e {
            StepError::PhaseMismatch { .. } => Self::phase_mismatch(e.to_string()),
            StepError::InvalidPayload(m) => Self::bad_request("invalid_payload", m),
            StepError::Validation {
                message,
                violations,
                missing_vectors,
            } => Self::bad_request("validation_error", message).with_violations(violations, missing_vectors),
            StepError::Formula(f) => f.into(),
            StepError::Verify(v) => v.into(),
            StepError::Internal(m) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal_error", m),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "not_found", e.to_string()),
            StoreError::Conflict(_) => Self::new(StatusCode::CONFLICT, "conflict", e.to_string()),
            StoreError::Io(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", e.to_string()),
        }
    }
}

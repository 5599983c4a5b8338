use std::time::Instant;

use thiserror::Error;

use super::classes::{LogicClassId, ModelClassId};
use super::dispatch::{select_checker, select_checker_with_method, SelectionPolicy};
use super::registry::{Method, Registry, RegistryError};
use crate::checkers::{CheckError, VerificationResult};
use crate::logics::{parse_formula, Formula, FormulaParseError};
use crate::models::{parse_model_text, ModelDocument, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("formula: {0}")]
    Formula(#[from] FormulaParseError),
    #[error("formula mentions unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("formula mentions unknown agent `{0}`")]
    UnknownAgent(String),
    #[error(transparent)]
    Dispatch(#[from] RegistryError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl VerifyError {
    /// Whether the error stems from the user's input rather than from the
    /// checker infrastructure.
    pub fn is_input_error(&self) -> bool {
        match self {
            VerifyError::Model(_)
            | VerifyError::Formula(_)
            | VerifyError::UnknownAtom(_)
            | VerifyError::UnknownAgent(_) => true,
            VerifyError::Dispatch(e) => matches!(e, RegistryError::NoCapableChecker { .. }),
            VerifyError::Check(e) => {
                matches!(e, CheckError::UnknownAtom(_) | CheckError::UnknownAgent(_))
            }
        }
    }

    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            VerifyError::Model(e) => e.code(),
            VerifyError::Formula(_) => "formula_parse_error",
            VerifyError::UnknownAtom(_) | VerifyError::Check(CheckError::UnknownAtom(_)) => {
                "unknown_atom"
            }
            VerifyError::UnknownAgent(_) | VerifyError::Check(CheckError::UnknownAgent(_)) => {
                "unknown_agent"
            }
            VerifyError::Dispatch(RegistryError::NoCapableChecker { .. }) => "no_capable_checker",
            VerifyError::Dispatch(_) | VerifyError::Check(_) => "internal_error",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub policy: SelectionPolicy,
    /// Restricts selection to one method instead of following the policy.
    pub method: Option<Method>,
}

impl From<SelectionPolicy> for VerifyOptions {
    fn from(policy: SelectionPolicy) -> Self {
        Self {
            policy,
            method: None,
        }
    }
}

pub fn classify_model(doc: &ModelDocument) -> ModelClassId {
    doc.model_class()
}

/// `ATL` as soon as a coalition modality occurs, `CTL` otherwise
/// (including purely propositional formulas).
pub fn classify_formula(f: &Formula) -> LogicClassId {
    if f.has_coalition_modality() {
        LogicClassId::ATL
    } else {
        LogicClassId::CTL
    }
}

/// Checks that every atom and agent in `f` belongs to the model.
pub fn check_alphabet(doc: &ModelDocument, f: &Formula) -> Result<(), VerifyError> {
    if let Some(a) = f.atoms().into_iter().find(|a| !doc.atoms().iter().any(|x| x == a)) {
        return Err(VerifyError::UnknownAtom(a.to_string()));
    }
    if let Some(a) = f.agents().into_iter().find(|a| !doc.agents().iter().any(|x| x == a)) {
        return Err(VerifyError::UnknownAgent(a.to_string()));
    }
    Ok(())
}

/// Parses, classifies, dispatches and runs one verification.
pub fn verify(
    registry: &Registry,
    model_text: &str,
    formula_text: &str,
    policy: &SelectionPolicy,
) -> Result<VerificationResult, VerifyError> {
    verify_with(registry, model_text, formula_text, &VerifyOptions::from(*policy))
}

pub fn verify_with(
    registry: &Registry,
    model_text: &str,
    formula_text: &str,
    options: &VerifyOptions,
) -> Result<VerificationResult, VerifyError> {
    let doc = parse_model_text(model_text)?;
    let f = parse_formula(formula_text)?;
    verify_document(registry, &doc, &f, options)
}

pub fn verify_document(
    registry: &Registry,
    doc: &ModelDocument,
    f: &Formula,
    options: &VerifyOptions,
) -> Result<VerificationResult, VerifyError> {
    let model_class = classify_model(doc);
    let logic_class = classify_formula(f);
    check_alphabet(doc, f)?;
    let n = doc.state_count();
    let (checker, trace) = match options.method {
        Some(m) => select_checker_with_method(registry, model_class, logic_class, n, &options.policy, m)?,
        None => select_checker(registry, model_class, logic_class, n, &options.policy)?,
    };
    let start = Instant::now();
    let outcome = checker.run.check(doc, f)?;
    let elapsed = start.elapsed();
    let mut result = VerificationResult::new(
        doc.states(),
        doc.initial(),
        outcome.satisfaction,
        f.to_string(),
        trace,
        checker.id.clone(),
    );
    result.witness = outcome.witness;
    result.elapsed = elapsed;
    Ok(result)
}

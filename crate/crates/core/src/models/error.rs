use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::ModelClassId;

/// A single broken model invariant, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "invariant", rename_all = "kebab-case")]
pub enum Violation {
    Identifier {
        name: String,
    },
    UniqueNames {
        kind: &'static str,
        name: String,
    },
    NonEmpty {
        what: &'static str,
    },
    KnownState {
        context: &'static str,
        state: String,
    },
    KnownAgent {
        agent: String,
    },
    DeclaredAtom {
        state: String,
        atom: String,
    },
    DeclaredActions {
        agent: String,
    },
    Arity {
        state: String,
        expected: usize,
        found: usize,
    },
    DeclaredAction {
        state: String,
        agent: String,
        action: String,
    },
    Determinism {
        state: String,
        joint: Vec<String>,
        targets: Vec<String>,
    },
    Totality {
        state: String,
    },
    ProductClosure {
        state: String,
        joint: Vec<String>,
    },
}

impl Violation {
    /// Short name of the invariant this violation breaks.
    pub fn invariant(&self) -> &'static str {
        match self {
            Violation::Identifier { .. } => "identifier",
            Violation::UniqueNames { .. } => "unique-names",
            Violation::NonEmpty { .. } => "non-empty",
            Violation::KnownState { .. } => "known-state",
            Violation::KnownAgent { .. } => "known-agent",
            Violation::DeclaredAtom { .. } => "declared-atom",
            Violation::DeclaredActions { .. } => "declared-actions",
            Violation::Arity { .. } => "arity",
            Violation::DeclaredAction { .. } => "declared-action",
            Violation::Determinism { .. } => "determinism",
            Violation::Totality { .. } => "totality",
            Violation::ProductClosure { .. } => "product-closure",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Identifier { name } => write!(f, "`{name}` is not a valid identifier"),
            Violation::UniqueNames { kind, name } => write!(f, "duplicate {kind} `{name}`"),
            Violation::NonEmpty { what } => write!(f, "no {what} declared"),
            Violation::KnownState { context, state } => {
                write!(f, "{context} refers to undeclared state `{state}`")
            }
            Violation::KnownAgent { agent } => {
                write!(f, "actions declared for undeclared agent `{agent}`")
            }
            Violation::DeclaredAtom { state, atom } => {
                write!(f, "state `{state}` is labelled with undeclared atom `{atom}`")
            }
            Violation::DeclaredActions { agent } => write!(f, "agent `{agent}` has no actions"),
            Violation::Arity {
                state,
                expected,
                found,
            } => write!(
                f,
                "transition from `{state}` has {found} action(s), expected one per agent ({expected})"
            ),
            Violation::DeclaredAction {
                state,
                agent,
                action,
            } => write!(
                f,
                "transition from `{state}` uses action `{action}` not declared for agent `{agent}`"
            ),
            Violation::Determinism {
                state,
                joint,
                targets,
            } => write!(
                f,
                "state `{state}` under ({}) has several successors: {}",
                joint.join(","),
                targets.join(", ")
            ),
            Violation::Totality { state } => write!(f, "state `{state}` has no successor"),
            Violation::ProductClosure { state, joint } => write!(
                f,
                "state `{state}` is missing a transition for joint action ({})",
                joint.join(",")
            ),
        }
    }
}

/// All violations found while validating one model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ValidationErrors(pub Vec<Violation>);

impl ValidationErrors {
    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }

    /// `(state, joint action)` pairs reported as missing by product closure.
    pub fn missing_vectors(&self) -> Vec<(String, Vec<String>)> {
        self.0
            .iter()
            .filter_map(|v| match v {
                Violation::ProductClosure { state, joint } => Some((state.clone(), joint.clone())),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {v}", v.invariant())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model: {0}")]
    Validation(ValidationErrors),
    #[error("unknown model class `{0}`")]
    UnknownModelClass(String),
    #[error("model class `{0}` has no text format")]
    Unsupported(ModelClassId),
}

impl ModelError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::Parse { .. } => "parse_error",
            ModelError::Validation(_) => "validation_error",
            ModelError::UnknownModelClass(_) => "unknown_model_class",
            ModelError::Unsupported(_) => "unsupported_model_class",
        }
    }
}

impl From<ValidationErrors> for ModelError {
    fn from(e: ValidationErrors) -> Self {
        ModelError::Validation(e)
    }
}

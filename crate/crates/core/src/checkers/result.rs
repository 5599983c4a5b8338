use std::time::Duration;

use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use super::MemorylessStrategy;
use crate::kernel::{LogicClassId, Method, ModelClassId, SelectionTrace};
use crate::state_set::StateSet;

/// Outcome of one verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub model_class: ModelClassId,
    pub logic_class: LogicClassId,
    /// Canonical rendering of the checked formula.
    pub formula: String,
    /// Conjunction of `per_initial`.
    pub overall: bool,
    pub per_initial: IndexMap<String, bool>,
    pub satisfaction_set: StateSet,
    pub satisfying_states: Vec<String>,
    pub method: Method,
    pub checker: String,
    pub trace: SelectionTrace,
    pub witness: Option<MemorylessStrategy>,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
}

fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl VerificationResult {
    pub fn new(
        states: &[String],
        initial: &[usize],
        satisfaction_set: StateSet,
        formula: String,
        trace: SelectionTrace,
        checker: String,
    ) -> Self {
        let per_initial: IndexMap<String, bool> = initial
            .iter()
            .map(|&s| (states[s].clone(), satisfaction_set.contains(s)))
            .collect();
        Self {
            model_class: trace.model_class,
            logic_class: trace.logic_class,
            formula,
            overall: per_initial.values().all(|&v| v),
            per_initial,
            satisfying_states: satisfaction_set.iter().map(|s| states[s].clone()).collect(),
            satisfaction_set,
            method: trace.used_method,
            checker,
            trace,
            witness: None,
            elapsed: Duration::ZERO,
        }
    }

    /// Equality on everything except the wall-clock time.
    pub fn eq_ignoring_elapsed(&self, other: &Self) -> bool {
        Self {
            elapsed: other.elapsed,
            ..self.clone()
        } == *other
    }
}

//! The wizard: a session that builds a CGS step by step.
//!
//! Phases run `Agents -> States -> Actions -> Transitions -> Review ->
//! Formula -> Done`. Submitting the step of an earlier phase is a back-edit:
//! it replaces that step's content and clears everything after it.

use std::collections::BTreeMap;

use agentcheck_core::kernel::{verify_document, Registry, VerifyError, VerifyOptions};
use agentcheck_core::logics::{parse_formula, Formula, FormulaParseError, KEYWORDS};
use agentcheck_core::models::{
    is_identifier, joint_names_product, serialize_model, Cgs, CgsSpec, ModelDocument,
    TransitionRow, Violation,
};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    Agents,
    States,
    Actions,
    Transitions,
    Review,
    Formula,
    Verifying,
    Done,
}

impl Phase {
    fn next(self) -> Phase {
        match self {
            Phase::Agents => Phase::States,
            Phase::States => Phase::Actions,
            Phase::Actions => Phase::Transitions,
            Phase::Transitions => Phase::Review,
            Phase::Review => Phase::Formula,
            Phase::Formula | Phase::Verifying | Phase::Done => Phase::Done,
        }
    }
}

/// Kind of a submitted step. Each kind belongs to one phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Agents,
    States,
    Actions,
    Transitions,
    Review,
    Formula,
    /// Navigates back to an earlier phase, keeping its content.
    Back,
}

impl StepKind {
    fn phase(self) -> Option<Phase> {
        Some(match self {
            StepKind::Agents => Phase::Agents,
            StepKind::States => Phase::States,
            StepKind::Actions => Phase::Actions,
            StepKind::Transitions => Phase::Transitions,
            StepKind::Review => Phase::Review,
            StepKind::Formula => Phase::Formula,
            StepKind::Back => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentsPayload {
    agents: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatesPayload {
    states: Vec<String>,
    initial: Vec<String>,
    #[serde(default)]
    atoms: Vec<String>,
    #[serde(default)]
    labels: IndexMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionsPayload {
    actions: IndexMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionsPayload {
    rows: Vec<TransitionRow>,
    #[serde(default = "yes")]
    complete: bool,
    /// Declared availability per state and agent. Without it, availability
    /// is whatever the rows use.
    #[serde(default)]
    protocol: Option<Protocol>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewPayload {
    confirm: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormulaPayload {
    formula: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BackPayload {
    to: Phase,
}

/// `state -> agent -> actions`.
pub type Protocol = BTreeMap<String, BTreeMap<String, Vec<String>>>;

/// The model under construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Draft {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub atoms: Vec<String>,
    pub labels: IndexMap<String, Vec<String>>,
    pub actions: IndexMap<String, Vec<String>>,
    pub transitions: Vec<TransitionRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol>,
}

impl Draft {
    /// Clears the content of `phase` and of every later phase.
    fn clear_from(&mut self, phase: Phase) {
        if phase <= Phase::Agents {
            self.agents.clear();
        }
        if phase <= Phase::States {
            self.states.clear();
            self.initial.clear();
            self.atoms.clear();
            self.labels.clear();
        }
        if phase <= Phase::Actions {
            self.actions.clear();
        }
        if phase <= Phase::Transitions {
            self.transitions.clear();
            self.protocol = None;
        }
    }

    pub fn spec(&self) -> CgsSpec {
        CgsSpec {
            agents: self.agents.clone(),
            states: self.states.clone(),
            initial: self.initial.clone(),
            atoms: self.atoms.clone(),
            labels: self.labels.iter().map(|(s, a)| (s.clone(), a.clone())).collect(),
            actions: self.actions.iter().map(|(a, acts)| (a.clone(), acts.clone())).collect(),
            transitions: self.transitions.clone(),
        }
    }

    pub fn build(&self) -> Result<Cgs, Vec<Violation>> {
        self.spec().build().map_err(|e| e.0)
    }

    /// Actions offered to `agent` in `state`: the declared protocol if any,
    /// otherwise every declared action.
    fn offered(&self, state: &str, agent: &str) -> Vec<String> {
        self.protocol
            .as_ref()
            .and_then(|p| p.get(state))
            .and_then(|m| m.get(agent))
            .cloned()
            .unwrap_or_else(|| self.actions.get(agent).cloned().unwrap_or_default())
    }

    /// One entry per state and offered joint action vector, with the target
    /// chosen so far.
    pub fn joint_table(&self) -> Vec<JointEntry> {
        let mut out = Vec::new();
        for s in &self.states {
            let offered: Vec<Vec<String>> = self.agents.iter().map(|a| self.offered(s, a)).collect();
            for joint in joint_names_product(&offered) {
                let target = self
                    .transitions
                    .iter()
                    .find(|r| &r.state == s && r.joint == joint)
                    .map(|r| r.target.clone());
                out.push(JointEntry {
                    state: s.clone(),
                    joint,
                    target,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JointEntry {
    pub state: String,
    pub joint: Vec<String>,
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingVector {
    pub state: String,
    pub joint: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("step `{kind:?}` does not fit phase {phase:?}")]
    PhaseMismatch { phase: Phase, kind: StepKind },
    #[error("invalid payload: {0}")]
    InvalidPayload(String),
    #[error("{message}")]
    Validation {
        message: String,
        violations: Vec<Violation>,
        missing_vectors: Vec<MissingVector>,
    },
    #[error("formula: {0}")]
    Formula(#[from] FormulaParseError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("internal error: {0}")]
    Internal(String),
}

fn invalid(message: impl Into<String>, violations: Vec<Violation>) -> StepError {
    StepError::Validation {
        message: message.into(),
        violations,
        missing_vectors: Vec::new(),
    }
}

fn payload<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, StepError> {
    serde_json::from_value(v.clone()).map_err(|e| StepError::InvalidPayload(e.to_string()))
}

/// Names must be unique identifiers. Agent and atom names also appear in
/// formulas, so they cannot be formula keywords.
fn check_names(kind: &'static str, names: &[String], errs: &mut Vec<Violation>) {
    let in_formulas = matches!(kind, "agent" | "atom");
    for (i, n) in names.iter().enumerate() {
        if !is_identifier(n) || (in_formulas && KEYWORDS.contains(&n.as_str())) {
            errs.push(Violation::Identifier { name: n.clone() });
        }
        if names[..i].contains(n) {
            errs.push(Violation::UniqueNames { kind, name: n.clone() });
        }
    }
}

/// Wizard state without identity or timestamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wizard {
    pub phase: Phase,
    pub draft: Draft,
    /// Steps that produced the current draft, in order.
    pub steps: Vec<Step>,
    pub formula: Option<String>,
    pub last_result: Option<Value>,
}

impl Default for Wizard {
    fn default() -> Self {
        Self {
            phase: Phase::Agents,
            draft: Draft::default(),
            steps: Vec::new(),
            formula: None,
            last_result: None,
        }
    }
}

/// A formula accepted by the Formula step, ready to be checked.
#[derive(Debug, Clone)]
pub struct PendingCheck {
    pub document: ModelDocument,
    pub formula: Formula,
}

impl Wizard {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonical text of the draft model, once it has passed validation.
    pub fn model_text(&self) -> Option<String> {
        if self.phase < Phase::Review {
            return None;
        }
        self.draft.build().ok().map(|g| serialize_model(&ModelDocument::from(g)))
    }

    pub fn document(&self) -> Option<ModelDocument> {
        if self.phase < Phase::Review {
            return None;
        }
        self.draft.build().ok().map(ModelDocument::from)
    }

    /// Entry point for a target phase: the current phase or an earlier one.
    fn enter(&mut self, kind: StepKind, target: Phase) -> Result<(), StepError> {
        let current = if self.phase == Phase::Done { Phase::Formula } else { self.phase };
        if self.phase == Phase::Verifying || target > current {
            return Err(StepError::PhaseMismatch {
                phase: self.phase,
                kind,
            });
        }
        Ok(())
    }

    /// Discards content and step records from `phase` on.
    fn rewind(&mut self, phase: Phase) {
        self.draft.clear_from(phase);
        self.steps.retain(|s| s.kind.phase().is_some_and(|p| p < phase));
        if phase <= Phase::Formula {
            self.formula = None;
            self.last_result = None;
        }
    }

    /// Applies one step. A Formula step returns the check to run; the caller
    /// runs it and passes the outcome to [`Wizard::finish`].
    pub fn apply(&mut self, step: &Step) -> Result<Option<PendingCheck>, StepError> {
        if step.kind == StepKind::Back {
            let BackPayload { to } = payload(&step.payload)?;
            if to > Phase::Formula {
                return Err(StepError::InvalidPayload(format!("cannot go back to {to:?}")));
            }
            self.enter(step.kind, to)?;
            self.draft.clear_from(to.next());
            self.steps
                .retain(|s| s.kind.phase().is_some_and(|p| p <= to.min(Phase::Review)));
            if to == Phase::Transitions {
                // one open-ended step, so later rows accumulate on replay
                self.steps.retain(|s| s.kind != StepKind::Transitions);
                let mut payload = serde_json::json!({
                    "rows": self.draft.transitions,
                    "complete": false,
                });
                if let Some(p) = &self.draft.protocol {
                    payload["protocol"] = serde_json::json!(p);
                }
                self.steps.push(Step {
                    kind: StepKind::Transitions,
                    payload,
                });
            }
            self.formula = None;
            self.last_result = None;
            self.phase = to;
            return Ok(None);
        }
        let target = step.kind.phase().expect("non-back step");
        self.enter(step.kind, target)?;
        if step.kind == StepKind::Formula {
            return self.formula_step(payload(&step.payload)?, step);
        }
        let mut next = self.clone();
        // transition rows accumulate while the phase is current
        if step.kind != StepKind::Transitions || target < self.phase {
            next.rewind(target);
        }
        let pending = match step.kind {
            StepKind::Agents => next.agents(payload(&step.payload)?)?,
            StepKind::States => next.states(payload(&step.payload)?)?,
            StepKind::Actions => next.actions(payload(&step.payload)?)?,
            StepKind::Transitions => next.transitions(payload(&step.payload)?)?,
            StepKind::Review => next.review(payload(&step.payload)?)?,
            StepKind::Formula | StepKind::Back => unreachable!(),
        };
        next.steps.push(step.clone());
        *self = next;
        Ok(pending)
    }

    fn agents(&mut self, p: AgentsPayload) -> Result<Option<PendingCheck>, StepError> {
        let mut errs = Vec::new();
        if p.agents.is_empty() {
            errs.push(Violation::NonEmpty { what: "agents" });
        }
        check_names("agent", &p.agents, &mut errs);
        if !errs.is_empty() {
            return Err(invalid("invalid agents", errs));
        }
        self.draft.agents = p.agents;
        self.phase = Phase::States;
        Ok(None)
    }

    fn states(&mut self, p: StatesPayload) -> Result<Option<PendingCheck>, StepError> {
        let mut errs = Vec::new();
        if p.states.is_empty() {
            errs.push(Violation::NonEmpty { what: "states" });
        }
        if p.initial.is_empty() {
            errs.push(Violation::NonEmpty { what: "initial" });
        }
        check_names("state", &p.states, &mut errs);
        check_names("atom", &p.atoms, &mut errs);
        for s in &p.initial {
            if !p.states.contains(s) {
                errs.push(Violation::KnownState {
                    context: "initial",
                    state: s.clone(),
                });
            }
        }
        for (s, atoms) in &p.labels {
            if !p.states.contains(s) {
                errs.push(Violation::KnownState {
                    context: "label",
                    state: s.clone(),
                });
            }
            for a in atoms {
                if !p.atoms.contains(a) {
                    errs.push(Violation::DeclaredAtom {
                        state: s.clone(),
                        atom: a.clone(),
                    });
                }
            }
        }
        if !errs.is_empty() {
            return Err(invalid("invalid states", errs));
        }
        self.draft.states = p.states;
        self.draft.initial = p.initial;
        self.draft.atoms = p.atoms;
        self.draft.labels = p.labels.into_iter().filter(|(_, a)| !a.is_empty()).collect();
        self.phase = Phase::Actions;
        Ok(None)
    }

    fn actions(&mut self, p: ActionsPayload) -> Result<Option<PendingCheck>, StepError> {
        let mut errs = Vec::new();
        for agent in p.actions.keys() {
            if !self.draft.agents.contains(agent) {
                errs.push(Violation::KnownAgent { agent: agent.clone() });
            }
        }
        let mut actions = IndexMap::new();
        for agent in &self.draft.agents {
            match p.actions.get(agent) {
                Some(acts) if !acts.is_empty() => {
                    let mut local = Vec::new();
                    check_names("action", acts, &mut local);
                    errs.extend(local);
                    actions.insert(agent.clone(), acts.clone());
                }
                _ => errs.push(Violation::DeclaredActions { agent: agent.clone() }),
            }
        }
        if !errs.is_empty() {
            return Err(invalid("invalid actions", errs));
        }
        self.draft.actions = actions;
        self.phase = Phase::Transitions;
        Ok(None)
    }

    fn transitions(&mut self, p: TransitionsPayload) -> Result<Option<PendingCheck>, StepError> {
        let mut rows = self.draft.transitions.clone();
        for row in p.rows {
            match rows
                .iter_mut()
                .find(|r| r.state == row.state && r.joint == row.joint)
            {
                Some(existing) => existing.target = row.target,
                None => rows.push(row),
            }
        }
        let protocol = p.protocol.or_else(|| self.draft.protocol.clone());
        let candidate = Draft {
            transitions: rows,
            protocol,
            ..self.draft.clone()
        };
        if let Some(proto) = &candidate.protocol {
            let errs = self.check_protocol(proto);
            if !errs.is_empty() {
                return Err(invalid("invalid protocol", errs));
            }
        }
        if p.complete {
            let missing: Vec<MissingVector> = candidate
                .joint_table()
                .into_iter()
                .filter(|e| candidate.protocol.is_some() && e.target.is_none())
                .map(|e| MissingVector {
                    state: e.state,
                    joint: e.joint,
                })
                .collect();
            let violations = match candidate.build() {
                Ok(_) => Vec::new(),
                Err(v) => v,
            };
            if !missing.is_empty() || !violations.is_empty() {
                let mut missing_vectors = missing;
                for v in &violations {
                    if let Violation::ProductClosure { state, joint } = v {
                        let m = MissingVector {
                            state: state.clone(),
                            joint: joint.clone(),
                        };
                        if !missing_vectors.contains(&m) {
                            missing_vectors.push(m);
                        }
                    }
                }
                let message = if missing_vectors.is_empty() {
                    "transition table is invalid".to_string()
                } else {
                    format!("{} joint action vectors have no target", missing_vectors.len())
                };
                return Err(StepError::Validation {
                    message,
                    violations,
                    missing_vectors,
                });
            }
            self.phase = Phase::Review;
        }
        self.draft = candidate;
        Ok(None)
    }

    fn check_protocol(&self, proto: &Protocol) -> Vec<Violation> {
        let mut errs = Vec::new();
        for (state, per_agent) in proto {
            if !self.draft.states.contains(state) {
                errs.push(Violation::KnownState {
                    context: "protocol",
                    state: state.clone(),
                });
            }
            for (agent, acts) in per_agent {
                let Some(declared) = self.draft.actions.get(agent) else {
                    errs.push(Violation::KnownAgent { agent: agent.clone() });
                    continue;
                };
                if acts.is_empty() {
                    errs.push(Violation::Totality { state: state.clone() });
                }
                for a in acts.iter().filter(|a| !declared.contains(a)) {
                    errs.push(Violation::DeclaredAction {
                        state: state.clone(),
                        agent: agent.clone(),
                        action: a.clone(),
                    });
                }
            }
        }
        errs
    }

    fn review(&mut self, p: ReviewPayload) -> Result<Option<PendingCheck>, StepError> {
        if !p.confirm {
            return Err(StepError::InvalidPayload(
                "review must be confirmed; go back to edit".into(),
            ));
        }
        self.phase = Phase::Formula;
        Ok(None)
    }

    fn formula_step(&mut self, p: FormulaPayload, step: &Step) -> Result<Option<PendingCheck>, StepError> {
        let formula = parse_formula(&p.formula)?;
        let document = self.draft.build().map(ModelDocument::from).map_err(|v| {
            invalid("draft model is invalid", v)
        })?;
        self.rewind(Phase::Formula);
        self.steps.push(step.clone());
        self.formula = Some(formula.to_string());
        self.phase = Phase::Verifying;
        Ok(Some(PendingCheck { document, formula }))
    }

    /// Records the outcome of a check started by a Formula step.
    pub fn finish(&mut self, outcome: Result<Value, StepError>) -> Result<(), StepError> {
        match outcome {
            Ok(result) => {
                self.last_result = Some(result);
                self.phase = Phase::Done;
                Ok(())
            }
            Err(e) => {
                self.steps.retain(|s| s.kind != StepKind::Formula);
                self.formula = None;
                self.phase = Phase::Formula;
                Err(e)
            }
        }
    }

    /// Applies a step and, for Formula steps, runs the check inline.
    pub fn apply_and_check(
        &mut self,
        step: &Step,
        registry: &Registry,
        options: &VerifyOptions,
    ) -> Result<(), StepError> {
        if let Some(p) = self.apply(step)? {
            let outcome = run_check(registry, &p, options);
            self.finish(outcome)?;
        }
        Ok(())
    }
}

pub fn run_check(registry: &Registry, p: &PendingCheck, options: &VerifyOptions) -> Result<Value, StepError> {
    let result = verify_document(registry, &p.document, &p.formula, options)?;
    serde_json::to_value(&result).map_err(|e| StepError::Internal(e.to_string()))
}

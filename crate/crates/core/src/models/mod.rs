//! Model classes: concurrent game structures and Kripke structures, their
//! text format, validation and projections.

use std::collections::HashMap;

mod cgs;
mod dot;
mod error;
mod kripke;
mod text;

pub use cgs::{joint_names_product, Cgs, CgsSpec, Coalition, Move, TransitionRow};
pub use dot::export_dot;
pub use error::{ModelError, ValidationErrors, Violation};
pub use kripke::{kripke_of_cgs, Kripke, KripkeSpec, VIEW_AGENT};
pub use text::{parse_model_text, serialize_model};

#[cfg(any(test, feature = "testing"))]
pub(crate) use cgs::joint_product;

use crate::kernel::ModelClassId;

/// Identifier rule shared by models and formulas: a letter or underscore,
/// then letters, digits or underscores.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_identifiers<'a>(names: impl Iterator<Item = &'a String>, errs: &mut Vec<Violation>) {
    for n in names {
        if !is_identifier(n) {
            errs.push(Violation::Identifier { name: n.clone() });
        }
    }
}

/// Maps each name to its first index, reporting duplicates.
fn index_names<'a>(
    names: &'a [String],
    kind: &'static str,
    errs: &mut Vec<Violation>,
) -> HashMap<&'a str, usize> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.contains_key(n.as_str()) {
            errs.push(Violation::UniqueNames {
                kind,
                name: n.clone(),
            });
        } else {
            map.insert(n.as_str(), i);
        }
    }
    map
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Cgs(Cgs),
    Kripke(Kripke),
}

/// A parsed, validated model together with its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    model_class: ModelClassId,
    payload: Model,
}

impl ModelDocument {
    pub fn new(payload: Model) -> Self {
        let model_class = match payload {
            Model::Cgs(_) => ModelClassId::CGS,
            Model::Kripke(_) => ModelClassId::KRIPKE,
        };
        Self {
            model_class,
            payload,
        }
    }

    pub fn model_class(&self) -> ModelClassId {
        self.model_class
    }

    pub fn payload(&self) -> &Model {
        &self.payload
    }

    pub fn states(&self) -> &[String] {
        match &self.payload {
            Model::Cgs(g) => g.states(),
            Model::Kripke(k) => k.states(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.states().len()
    }

    pub fn initial(&self) -> &[usize] {
        match &self.payload {
            Model::Cgs(g) => g.initial(),
            Model::Kripke(k) => k.initial(),
        }
    }

    pub fn atoms(&self) -> &[String] {
        match &self.payload {
            Model::Cgs(g) => g.atoms(),
            Model::Kripke(k) => k.atoms(),
        }
    }

    /// Agents of a CGS; empty for Kripke structures.
    pub fn agents(&self) -> &[String] {
        match &self.payload {
            Model::Cgs(g) => g.agents(),
            Model::Kripke(_) => &[],
        }
    }

    pub fn label(&self, state: usize) -> &[usize] {
        match &self.payload {
            Model::Cgs(g) => g.label(state),
            Model::Kripke(k) => k.label(state),
        }
    }
}

impl From<Cgs> for ModelDocument {
    fn from(g: Cgs) -> Self {
        Self::new(Model::Cgs(g))
    }
}

impl From<Kripke> for ModelDocument {
    fn from(k: Kripke) -> Self {
        Self::new(Model::Kripke(k))
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_rule() {
        for ok in ["A0", "_x", "goal", "S_3"] {
            assert!(is_identifier(ok), "{ok}");
        }
        for bad in ["", "0A", "a-b", "é", "a b"] {
            assert!(!is_identifier(bad), "{bad}");
        }
    }

    #[test]
    fn invalid_identifiers_fail_validation() {
        let spec = KripkeSpec {
            states: vec!["ok".into(), "9lives".into()],
            initial: vec!["ok".into()],
            edges: vec![("ok".into(), vec!["ok".into()]), ("9lives".into(), vec!["ok".into()])],
            ..Default::default()
        };
        let errs = spec.build().unwrap_err();
        assert!(errs.iter().any(|v| v.invariant() == "identifier"));
    }
}

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::classes::{LogicClassId, ModelClassId};
use crate::checkers::{Checker, ExplicitAtlChecker, ExplicitCtlChecker};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    Explicit,
    Implicit,
    Abstract,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Explicit, Method::Implicit, Method::Abstract];

    pub fn name(self) -> &'static str {
        match self {
            Method::Explicit => "Explicit",
            Method::Implicit => "Implicit",
            Method::Abstract => "Abstract",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone)]
pub struct CheckerDescriptor {
    pub id: String,
    pub model_class: ModelClassId,
    pub logic_class: LogicClassId,
    pub method: Method,
    pub run: Arc<dyn Checker>,
}

impl CheckerDescriptor {
    pub fn new(
        id: impl Into<String>,
        model_class: ModelClassId,
        logic_class: LogicClassId,
        method: Method,
        run: impl Checker + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            model_class,
            logic_class,
            method,
            run: Arc::new(run),
        }
    }

    pub fn triple(&self) -> (ModelClassId, LogicClassId, Method) {
        (self.model_class, self.logic_class, self.method)
    }
}

impl fmt::Debug for CheckerDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckerDescriptor")
            .field("id", &self.id)
            .field("model_class", &self.model_class)
            .field("logic_class", &self.logic_class)
            .field("method", &self.method)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CheckerDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.triple() == other.triple()
    }
}

impl Serialize for CheckerDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CheckerDescriptor", 4)?;
        st.serialize_field("id", &self.id)?;
        st.serialize_field("model_class", &self.model_class)?;
        st.serialize_field("logic_class", &self.logic_class)?;
        st.serialize_field("method", &self.method)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("a checker for ({0}, {1}, {2}) is already registered")]
    DuplicateTriple(ModelClassId, LogicClassId, Method),
    #[error("registry is frozen")]
    RegistryFrozen,
    #[error("registry must be frozen before selection")]
    RegistryNotFrozen,
    #[error("no registered checker handles {logic_class} formulas on {model_class} models")]
    NoCapableChecker {
        model_class: ModelClassId,
        logic_class: LogicClassId,
    },
}

/// Model classes, logic classes and checkers known to the dispatcher.
/// Checkers are registered during setup; [`Registry::freeze`] ends setup.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    checkers: Vec<CheckerDescriptor>,
    frozen: bool,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The built-in explicit checkers, frozen.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register_checker(CheckerDescriptor::new(
            "explicit-atl-cgs",
            ModelClassId::CGS,
            LogicClassId::ATL,
            Method::Explicit,
            ExplicitAtlChecker,
        ))
        .expect("fresh registry");
        r.register_checker(CheckerDescriptor::new(
            "explicit-ctl-kripke",
            ModelClassId::KRIPKE,
            LogicClassId::CTL,
            Method::Explicit,
            ExplicitCtlChecker,
        ))
        .expect("fresh registry");
        r.freeze();
        r
    }

    pub fn register_checker(&mut self, d: CheckerDescriptor) -> Result<(), RegistryError> {
        if self.frozen {
            return Err(RegistryError::RegistryFrozen);
        }
        if self.checkers.iter().any(|c| c.triple() == d.triple()) {
            let (m, l, k) = d.triple();
            return Err(RegistryError::DuplicateTriple(m, l, k));
        }
        self.checkers.push(d);
        Ok(())
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Registered checkers in registration order.
    pub fn checkers(&self) -> &[CheckerDescriptor] {
        &self.checkers
    }

    pub fn len(&self) -> usize {
        self.checkers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkers.is_empty()
    }

    pub fn model_classes(&self) -> &'static [ModelClassId] {
        &ModelClassId::ALL
    }

    pub fn logic_classes(&self) -> &'static [LogicClassId] {
        &LogicClassId::ALL
    }

    pub fn find(
        &self,
        model_class: ModelClassId,
        logic_class: LogicClassId,
        method: Method,
    ) -> Option<&CheckerDescriptor> {
        self.checkers
            .iter()
            .find(|c| c.triple() == (model_class, logic_class, method))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atl() -> CheckerDescriptor {
        CheckerDescriptor::new(
            "x",
            ModelClassId::CGS,
            LogicClassId::ATL,
            Method::Explicit,
            ExplicitAtlChecker,
        )
    }

    #[test]
    fn registration_rules() {
        let mut r = Registry::new();
        r.register_checker(atl()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(
            r.register_checker(atl()),
            Err(RegistryError::DuplicateTriple(
                ModelClassId::CGS,
                LogicClassId::ATL,
                Method::Explicit
            ))
        );
        r.freeze();
        let mut other = atl();
        other.method = Method::Implicit;
        assert_eq!(r.register_checker(other), Err(RegistryError::RegistryFrozen));
    }

    #[test]
    fn standard_registry_is_frozen_and_ordered() {
        let r = Registry::standard();
        assert!(r.is_frozen());
        let ids: Vec<&str> = r.checkers().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["explicit-atl-cgs", "explicit-ctl-kripke"]);
    }
}

use serde::Serialize;
use thiserror::Error;

use super::classes::{LogicClassId, ModelClassId};
use super::registry::{CheckerDescriptor, Method, Registry, RegistryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("explicit threshold ({explicit}) must be positive and below the implicit threshold ({implicit})")]
pub struct PolicyError {
    pub explicit: usize,
    pub implicit: usize,
}

/// State-count thresholds for choosing a verification method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SelectionPolicy {
    explicit_max_states: usize,
    implicit_max_states: usize,
}

impl SelectionPolicy {
    pub const DEFAULT_EXPLICIT_MAX: usize = 50;
    pub const DEFAULT_IMPLICIT_MAX: usize = 100;

    pub fn new(explicit_max_states: usize, implicit_max_states: usize) -> Result<Self, PolicyError> {
        if explicit_max_states == 0 || explicit_max_states >= implicit_max_states {
            return Err(PolicyError {
                explicit: explicit_max_states,
                implicit: implicit_max_states,
            });
        }
        Ok(Self {
            explicit_max_states,
            implicit_max_states,
        })
    }

    pub fn explicit_max_states(&self) -> usize {
        self.explicit_max_states
    }

    pub fn implicit_max_states(&self) -> usize {
        self.implicit_max_states
    }

    /// Explicit below the first threshold, implicit below the second,
    /// abstract otherwise. Both comparisons are strict.
    pub fn preferred_method(&self, state_count: usize) -> Method {
        if state_count < self.explicit_max_states {
            Method::Explicit
        } else if state_count < self.implicit_max_states {
            Method::Implicit
        } else {
            Method::Abstract
        }
    }
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self {
            explicit_max_states: Self::DEFAULT_EXPLICIT_MAX,
            implicit_max_states: Self::DEFAULT_IMPLICIT_MAX,
        }
    }
}

/// How the dispatcher arrived at a checker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionTrace {
    pub model_class: ModelClassId,
    pub logic_class: LogicClassId,
    pub state_count: usize,
    pub preferred_method: Method,
    pub used_method: Method,
    pub fallback_applied: bool,
    pub note: String,
}

fn fallback_order(preferred: Method) -> Vec<Method> {
    let mut order = vec![preferred];
    order.extend(Method::ALL.into_iter().filter(|&m| m != preferred));
    order
}

/// First registered checker for `model_class` and a logic class serving
/// `logic_class`, trying methods in `order`.
fn first_capable<'r>(
    registry: &'r Registry,
    model_class: ModelClassId,
    logic_class: LogicClassId,
    order: &[Method],
) -> Option<&'r CheckerDescriptor> {
    order.iter().find_map(|&m| {
        logic_class
            .served_by()
            .iter()
            .find_map(|&l| registry.find(model_class, l, m))
    })
}

fn trace_note(
    d: &CheckerDescriptor,
    logic_class: LogicClassId,
    preferred: Method,
    forced: bool,
) -> String {
    let mut parts = Vec::new();
    if forced {
        parts.push(format!("method override: {}", d.method));
    }
    if d.method != preferred {
        parts.push(format!(
            "no {preferred} checker registered; fell back to {}",
            d.method
        ));
    }
    if d.logic_class != logic_class {
        parts.push(format!(
            "{logic_class} formula checked by {} checker",
            d.logic_class
        ));
    }
    parts.join("; ")
}

fn select(
    registry: &Registry,
    model_class: ModelClassId,
    logic_class: LogicClassId,
    state_count: usize,
    policy: &SelectionPolicy,
    forced: Option<Method>,
) -> Result<(CheckerDescriptor, SelectionTrace), RegistryError> {
    if !registry.is_frozen() {
        return Err(RegistryError::RegistryNotFrozen);
    }
    let preferred = policy.preferred_method(state_count);
    let order = match forced {
        Some(m) => vec![m],
        None => fallback_order(preferred),
    };
    let d = first_capable(registry, model_class, logic_class, &order).ok_or(
        RegistryError::NoCapableChecker {
            model_class,
            logic_class,
        },
    )?;
    let trace = SelectionTrace {
        model_class,
        logic_class,
        state_count,
        preferred_method: preferred,
        used_method: d.method,
        fallback_applied: d.method != preferred,
        note: trace_note(d, logic_class, preferred, forced.is_some()),
    };
    Ok((d.clone(), trace))
}

/// Picks a checker by the state-count policy, falling back through
/// Explicit, Implicit and Abstract when the preferred method is missing.
pub fn select_checker(
    registry: &Registry,
    model_class: ModelClassId,
    logic_class: LogicClassId,
    state_count: usize,
    policy: &SelectionPolicy,
) -> Result<(CheckerDescriptor, SelectionTrace), RegistryError> {
    select(registry, model_class, logic_class, state_count, policy, None)
}

/// Like [`select_checker`] but restricted to `method`. The trace still
/// records what the policy would have preferred.
pub fn select_checker_with_method(
    registry: &Registry,
    model_class: ModelClassId,
    logic_class: LogicClassId,
    state_count: usize,
    policy: &SelectionPolicy,
    method: Method,
) -> Result<(CheckerDescriptor, SelectionTrace), RegistryError> {
    select(registry, model_class, logic_class, state_count, policy, Some(method))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_validation() {
        assert!(SelectionPolicy::new(50, 100).is_ok());
        assert!(SelectionPolicy::new(100, 100).is_err());
        assert!(SelectionPolicy::new(0, 10).is_err());
        assert_eq!(SelectionPolicy::default(), SelectionPolicy::new(50, 100).unwrap());
    }

    #[test]
    fn threshold_boundaries() {
        let p = SelectionPolicy::default();
        for (n, m) in [
            (0, Method::Explicit),
            (49, Method::Explicit),
            (50, Method::Implicit),
            (99, Method::Implicit),
            (100, Method::Abstract),
        ] {
            assert_eq!(p.preferred_method(n), m, "{n}");
        }
    }

    #[test]
    fn selection_examples() {
        let r = Registry::standard();
        let p = SelectionPolicy::default();
        let (d, t) = select_checker(&r, ModelClassId::CGS, LogicClassId::ATL, 4, &p).unwrap();
        assert_eq!(d.method, Method::Explicit);
        assert!(!t.fallback_applied);
        assert!(t.note.is_empty());

        let (_, t) = select_checker(&r, ModelClassId::CGS, LogicClassId::ATL, 75, &p).unwrap();
        assert_eq!(t.preferred_method, Method::Implicit);
        assert_eq!(t.used_method, Method::Explicit);
        assert!(t.fallback_applied);

        assert_eq!(
            select_checker(&r, ModelClassId::KRIPKE, LogicClassId::SL, 150, &p).unwrap_err(),
            RegistryError::NoCapableChecker {
                model_class: ModelClassId::KRIPKE,
                logic_class: LogicClassId::SL
            }
        );
    }

    #[test]
    fn ctl_on_cgs_is_served_by_atl_checker() {
        let r = Registry::standard();
        let p = SelectionPolicy::default();
        let (d, t) = select_checker(&r, ModelClassId::CGS, LogicClassId::CTL, 4, &p).unwrap();
        assert_eq!(d.logic_class, LogicClassId::ATL);
        assert_eq!(t.logic_class, LogicClassId::CTL);
        assert!(!t.fallback_applied);
    }

    #[test]
    fn unfrozen_registry_is_rejected() {
        let r = Registry::new();
        assert_eq!(
            select_checker(&r, ModelClassId::CGS, LogicClassId::ATL, 1, &Default::default())
                .unwrap_err(),
            RegistryError::RegistryNotFrozen
        );
    }

    #[test]
    fn forced_method_keeps_policy_preference() {
        let r = Registry::standard();
        let p = SelectionPolicy::default();
        let (d, t) = select_checker_with_method(
            &r,
            ModelClassId::CGS,
            LogicClassId::ATL,
            120,
            &p,
            Method::Explicit,
        )
        .unwrap();
        assert_eq!(d.method, Method::Explicit);
        assert_eq!(t.preferred_method, Method::Abstract);
        assert!(t.fallback_applied);
        assert!(t.note.starts_with("method override"));
    }
}

//! Registries of model classes, logic classes and checkers, and the
//! dispatcher that picks a checker for a model and formula.

mod classes;
mod dispatch;
mod registry;
mod verify;

pub use classes::{LogicBranch, LogicClassId, ModelBranch, ModelClassId};
pub use dispatch::{
    select_checker, select_checker_with_method, PolicyError, SelectionPolicy, SelectionTrace,
};
pub use registry::{CheckerDescriptor, Method, Registry, RegistryError};
pub use verify::{
    check_alphabet, classify_formula, classify_model, verify, verify_document, verify_with,
    VerifyError, VerifyOptions,
};

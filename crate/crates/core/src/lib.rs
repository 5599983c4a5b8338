//! Explicit-state model checking of CTL and ATL.
//!
//! Models (Kripke structures and concurrent game structures), logics and
//! checkers are independent components tied together by a [`kernel::Registry`]
//! and a size-based dispatcher.
//!
//! ```
//! use agentcheck_core::kernel::{verify, Registry, SelectionPolicy};
//! use agentcheck_core::samples::M1;
//!
//! let registry = Registry::standard();
//! let result = verify(&registry, M1, "<A0,A1> F goal", &SelectionPolicy::default()).unwrap();
//! assert!(result.overall);
//! ```

pub mod checkers;
pub mod kernel;
pub mod logics;
pub mod models;
pub mod state_set;

#[cfg(feature = "testing")]
pub mod testing;

pub use state_set::StateSet;

/// Bundled example models.
pub mod samples {
    /// Two-agent, four-state game where `goal` holds in `S3`.
    pub const M1: &str = include_str!("../data/m1.cgs");
    /// Kripke projection of [`M1`].
    pub const K1: &str = include_str!("../data/k1.kripke");
}

//! Explicit model checking: fixpoint evaluation, witness strategies, and a
//! brute-force oracle for cross-checking.

mod fixpoint;
mod oracle;
mod result;
mod witness;

use thiserror::Error;

pub use fixpoint::{
    check_names, eval_atl, eval_atl_with_stats, eval_ctl, eval_ctl_with_stats, pre_coalition,
    AtlEvaluator, FixpointStats,
};
pub use oracle::{oracle_atl, MAX_AGENTS, MAX_AVAILABLE, MAX_STATES};
pub use result::VerificationResult;
pub use witness::{extract_witness, MemorylessStrategy, StrategyChoice};

use crate::kernel::ModelClassId;
use crate::logics::Formula;
use crate::models::{Model, ModelDocument};
use crate::state_set::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("formula is not in the evaluator basis: {0}")]
    NotDesugared(String),
    #[error(
        "model too large for the oracle ({states} states, {agents} agents, \
         up to {max_available} available actions)"
    )]
    SizeGuardExceeded {
        states: usize,
        agents: usize,
        max_available: usize,
    },
    #[error("checker expects a {expected} model, got {found}")]
    ModelMismatch {
        expected: ModelClassId,
        found: ModelClassId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub satisfaction: StateSet,
    pub witness: Option<MemorylessStrategy>,
    pub stats: FixpointStats,
}

/// A checking procedure for one model class.
pub trait Checker: Send + Sync {
    fn check(&self, doc: &ModelDocument, f: &Formula) -> Result<CheckOutcome, CheckError>;
}

/// Fixpoint ATL checker over CGS. Also decides CTL formulas, with `E` and
/// `A` read as the full and empty coalitions.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExplicitAtlChecker;

impl Checker for ExplicitAtlChecker {
    fn check(&self, doc: &ModelDocument, f: &Formula) -> Result<CheckOutcome, CheckError> {
        let Model::Cgs(g) = doc.payload() else {
            return Err(CheckError::ModelMismatch {
                expected: ModelClassId::CGS,
                found: doc.model_class(),
            });
        };
        let (satisfaction, stats) = eval_atl_with_stats(g, f)?;
        let from: Vec<usize> = g
            .initial()
            .iter()
            .copied()
            .filter(|&s| satisfaction.contains(s))
            .collect();
        let witness = if from.is_empty() {
            None
        } else {
            extract_witness(g, f, &from)?
        };
        Ok(CheckOutcome {
            satisfaction,
            witness,
            stats,
        })
    }
}

/// Fixpoint CTL checker over Kripke structures.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExplicitCtlChecker;

impl Checker for ExplicitCtlChecker {
    fn check(&self, doc: &ModelDocument, f: &Formula) -> Result<CheckOutcome, CheckError> {
        let Model::Kripke(k) = doc.payload() else {
            return Err(CheckError::ModelMismatch {
                expected: ModelClassId::KRIPKE,
                found: doc.model_class(),
            });
        };
        let (satisfaction, stats) = eval_ctl_with_stats(k, f)?;
        Ok(CheckOutcome {
            satisfaction,
            witness: None,
            stats,
        })
    }
}

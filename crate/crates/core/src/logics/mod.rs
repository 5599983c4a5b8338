//! Formulas: AST, concrete syntax, and rewriting into the evaluator basis.

mod ast;
mod desugar;
mod parser;

use std::collections::BTreeSet;

pub use ast::{AgentSet, Formula, Modality, Path, PathQuantifier};
pub use desugar::{desugar, is_desugared};
pub use parser::{parse_formula, FormulaParseError, KEYWORDS};

pub fn atoms_of(f: &Formula) -> BTreeSet<String> {
    f.atoms().into_iter().map(str::to_string).collect()
}

pub fn agents_of(f: &Formula) -> BTreeSet<String> {
    f.agents().into_iter().map(str::to_string).collect()
}

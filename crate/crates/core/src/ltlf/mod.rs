//! Finite-trace temporal logic: syntax, parsing, semantics and progression.

mod atoms;
mod formula;
mod parser;
mod progression;
mod semantics;

pub use atoms::{all_traces, is_valid_name, AtomSet, Trace, TraceState, MAX_ATOMS};
pub use formula::{Formula, Style};
pub use parser::{parse, parse_inferring_atoms};
pub use progression::{accepts_empty_continuation, mk_and, mk_not, mk_or, normalize, progress, to_dnf};
pub use semantics::{evaluate, satisfies};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlfError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown proposition '{0}'")]
    UnknownProposition(String),
    #[error("invalid proposition name '{0}'")]
    InvalidProposition(String),
    #[error("duplicate proposition '{0}'")]
    DuplicateProposition(String),
    #[error("too many propositions ({0})")]
    TooManyAtoms(usize),
    #[error("traces must contain at least one state")]
    EmptyTrace,
}

/// Parses and rewrites into the simplified core fragment used by the
/// automaton construction.
pub fn parse_core(text: &str, atoms: &AtomSet) -> Result<Formula, LtlfError> {
    Ok(normalize(&parse(text, atoms)?.expand_derived()))
}

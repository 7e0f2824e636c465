//! Hilbert-style proof checking: axiom recognition, rules and proof scripts.

mod check;
mod schema;
mod script;
mod taut;

pub use check::{check_proof, Justification, Line, Proof, Verdict};
pub use schema::{a2_instance, a3_instance, a4_instance, as_exists, as_iff, choice_instance, match_axiom, Mismatch, Schema};
pub use script::{parse_proof, print_proof};
pub use taut::{is_tautology_instance, skeleton, skeleton_is_tautology, Skeleton, MAX_SKELETON_ATOMS};

use thiserror::Error;

use crate::lang::LangError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("skeleton has {atoms} atoms; the truth table is limited to {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("{line}:{col}: {msg}")]
    Script { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Lang(#[from] LangError),
}

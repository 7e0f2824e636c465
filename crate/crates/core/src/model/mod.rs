//! Finite quasi-set semantics: frames over labeled m-atoms, interpretations,
//! satisfaction, bounded validity search and permutation checks.

mod desc;
mod eval;
mod frame;
mod perm;
mod validity;
mod value;

pub use desc::{FrameDesc, Loaded, RelationsDesc};
pub use eval::{is_true, refuting_valuation, satisfies, satisfying_valuation, Interpretation, Valuation};
pub use frame::{build_frame, pseudo_diagonal, DomainSpec, Frame, FrameKind, FrameSpec, PseudoDiagonal, DEFAULT_DOMAIN_BUDGET};
pub use perm::{permutation_invariance_check, veiled_extension};
pub use validity::{
    bounded_satisfiability, bounded_validity, types_up_to, Bounds, SearchOptions, SearchReport, SkippedFrame, Witness,
};
pub use value::Value;

use thiserror::Error;

use crate::lang::TypeExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("the domain of {ty} would have 2^{log2_size} elements, over the budget of {budget}")]
    BudgetExceeded { ty: TypeExpr, log2_size: usize, budget: usize },
    #[error("the classical domain M must not be empty")]
    EmptyClassical,
    #[error("type {ty} is deeper than the bound {bound}")]
    DepthExceeded { ty: TypeExpr, bound: usize },
    #[error("the frame has no domain for type {0}")]
    MissingType(TypeExpr),
    #[error("the listed relations of {0} are not closed under relabeling of atoms")]
    NotClosed(TypeExpr),
    #[error("bad value: {0}")]
    BadValue(String),
    #[error("identity undefined at type e1")]
    IdentityAtE1,
    #[error("no value for {0}")]
    Unassigned(String),
    #[error("{0} is not a constant")]
    NotAConstant(String),
    #[error("formula is not closed: {0} is free")]
    OpenFormula(String),
    #[error("{0}")]
    NotOpaque(String),
    #[error("frame description: {0}")]
    Desc(String),
}

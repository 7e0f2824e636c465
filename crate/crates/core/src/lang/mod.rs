//! Syntax of the typed language: types, terms, formulas, the concrete
//! grammar, substitution, desugaring and the opaque-relation classifier.

mod desugar;
mod opaque;
mod parse;
mod print;
mod subst;
mod syntax;

pub use desugar::{desugar, leibniz};
pub use opaque::{classify, is_opaque, NotOpaque};
pub use parse::{
    default_kind, parse_formula, parse_formula_at, parse_formula_file, parse_formula_in, parse_term,
    parse_term_in, parse_type, Context,
};
pub use print::print_formula;
pub use subst::{
    alpha_canonical, alpha_eq, free_terms, free_variables, fresh_name, is_free_for, occurs_free, rename_bound,
    substitute, universal_closure, SubstMode,
};
pub use syntax::{Atom, Formula, Identity, Term, TermKind, TypeExpr};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("identity undefined at type e1")]
    IdentityAtE1,
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: TypeExpr,
        found: TypeExpr,
    },
    #[error("{head} expects {expected} arguments, found {found}")]
    Arity { head: String, expected: usize, found: usize },
    #[error("{0} is not of a relation type")]
    NotARelation(String),
    #[error("{0} is not a relation type")]
    NotARelationType(TypeExpr),
    #[error("relation types need at least one component")]
    EmptyTuple,
    #[error("{0} is not a variable")]
    NotAVariable(String),
    #[error("{term} is not free for {var}")]
    NotFreeFor { term: String, var: String },
}

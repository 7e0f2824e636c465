//! Opaque relations: relation types built from `e1` alone.

use super::syntax::TypeExpr;
use super::LangError;

/// Why a relation type is not opaque: the first component (1-based) with an
/// `e2` leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotOpaque {
    pub component: usize,
}

impl std::fmt::Display for NotOpaque {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "not opaque: component {} has leaf e2", self.component)
    }
}

/// Classifies a relation type. `Ok(Ok(()))` means opaque.
pub fn classify(t: &TypeExpr) -> Result<Result<(), NotOpaque>, LangError> {
    let Some(components) = t.components() else {
        return Err(LangError::NotARelationType(t.clone()));
    };
    for (i, c) in components.iter().enumerate() {
        if !c.leaves().iter().all(|leaf| *leaf == TypeExpr::E1) {
            return Ok(Err(NotOpaque { component: i + 1 }));
        }
    }
    Ok(Ok(()))
}

/// True iff every component of the relation type is built from `e1` alone.
pub fn is_opaque(t: &TypeExpr) -> Result<bool, LangError> {
    Ok(classify(t)?.is_ok())
}

use rand::Rng;

use crate::lang::{classify, free_variables, Formula, Term, TypeExpr};
use crate::qset::QSet;

use super::eval::{satisfies, Interpretation, Valuation};
use super::ModelError;

/// Applies the atom permutation `perm` (`perm[old] = new`) to every denoted
/// element. Frames are closed under such permutations, so the frame itself
/// is unchanged.
pub(crate) fn relabel(i: &Interpretation, perm: &[usize]) -> Result<Interpretation, ModelError> {
    let frame = i.frame();
    let maps = frame.induced(perm);
    let mut out = Interpretation::new(frame.clone());
    for c in i.constants() {
        let e = i.index_of(c).expect("assigned");
        out.assign_index(c, maps[frame.domain_id(&c.ty)?][e]);
    }
    Ok(out)
}

/// Relabels the atoms by `trials` random species-preserving permutations
/// and reports whether the truth value of the closed formula `f` never
/// changes.
pub fn permutation_invariance_check<R: Rng + ?Sized>(
    i: &Interpretation,
    f: &Formula,
    trials: usize,
    rng: &mut R,
) -> Result<bool, ModelError> {
    if let Some(v) = free_variables(f).into_iter().next() {
        return Err(ModelError::OpenFormula(v.to_string()));
    }
    let empty = Valuation::new();
    let before = satisfies(i, &empty, f)?;
    for _ in 0..trials {
        let perm = i.frame().concretization().random_permutation(rng);
        if satisfies(&relabel(i, &perm)?, &empty, f)? != before {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The extension of an opaque predicate constant, reported as a quasi-set.
pub fn veiled_extension(i: &Interpretation, p: &Term) -> Result<QSet, ModelError> {
    match classify(&p.ty) {
        Ok(Ok(())) => {}
        Ok(Err(not)) => return Err(ModelError::NotOpaque(format!("not an opaque predicate: {}", not))),
        Err(e) => return Err(ModelError::NotOpaque(format!("not an opaque predicate: {e}"))),
    }
    if p.ty != TypeExpr::predicate_of(&TypeExpr::E1) {
        return Err(ModelError::NotOpaque(format!(
            "veiled extensions are computed for predicates of type <e1>, not {}",
            p.ty
        )));
    }
    let e = i.index_of(p).ok_or_else(|| ModelError::Unassigned(p.to_string()))?;
    let d = i.frame().domain(&p.ty)?;
    let labels: Vec<usize> = d.rels[e].ones().collect();
    Ok(i.frame().concretization().quotient_of_labels(&labels))
}

//! Seeded random generation of quasi-sets, formulas and interpretations for
//! property checks.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lang::{Formula, Term, TypeExpr};
use crate::model::{build_frame, Frame, FrameKind, FrameSpec, Interpretation, ModelError};
use crate::qset::{ClassicalElem, LabeledConcretization, QSet, Species};

/// A quasi-set with up to `max_species` species of multiplicity up to
/// `max_mult` and up to `max_classical` classical M-atoms.
pub fn random_qset<R: Rng + ?Sized>(rng: &mut R, max_species: usize, max_mult: u64, max_classical: usize) -> QSet {
    let species = rng.gen_range(0..=max_species);
    let pure: Vec<(Species, u64)> = (0..species)
        .map(|i| (Species::new(&format!("s{i}")), rng.gen_range(0..=max_mult)))
        .collect();
    let classical: BTreeSet<String> = (0..rng.gen_range(0..=max_classical))
        .map(|_| format!("a{}", rng.gen_range(0..2 * max_classical.max(1))))
        .collect();
    QSet::from_parts(pure, classical.into_iter().map(ClassicalElem::MAtom)).expect("distinct M-atoms")
}

/// A concretization of a random quasi-set with a few realized subsets.
pub fn random_concretization<R: Rng + ?Sized>(rng: &mut R, max_species: usize, max_mult: u64) -> LabeledConcretization {
    let q = random_qset(rng, max_species, max_mult, 2);
    let mut c = LabeledConcretization::from_qset(&q);
    for _ in 0..rng.gen_range(1..=3) {
        c = c.with_random_subset(rng);
    }
    c
}

/// Constants and relation types random formulas are built from.
#[derive(Debug, Clone)]
pub struct Signature {
    pub constants: Vec<Term>,
    pub relation_types: Vec<TypeExpr>,
}

impl Signature {
    /// Relation types of depth 1 and arity at most 2, one unary predicate
    /// constant per base type, a binary relation over `e1`, and an `e2`
    /// individual constant.
    pub fn small() -> Self {
        let p = |t: &[TypeExpr]| TypeExpr::Tuple(t.to_vec());
        let (e1, e2) = (TypeExpr::E1, TypeExpr::E2);
        let unary1 = p(std::slice::from_ref(&e1));
        let unary2 = p(std::slice::from_ref(&e2));
        let binary11 = p(&[e1.clone(), e1.clone()]);
        let binary12 = p(&[e1, e2.clone()]);
        Signature {
            constants: vec![
                Term::constant("P", unary1.clone()),
                Term::constant("A", unary2.clone()),
                Term::constant("R", binary11.clone()),
                Term::constant("S", binary12.clone()),
                Term::constant("a", e2),
            ],
            relation_types: vec![unary1, unary2, binary11, binary12],
        }
    }

    pub fn types(&self) -> BTreeSet<TypeExpr> {
        let mut out = BTreeSet::new();
        for t in self.constants.iter().map(|c| &c.ty).chain(&self.relation_types) {
            t.closure(&mut out);
        }
        out
    }
}

/// A random closed formula of connective depth at most `depth`. Identity
/// subformulas compare terms of types other than `e1`.
pub fn random_closed_formula<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    let mut g = FormulaGen {
        sig,
        scope: Vec::new(),
        counter: 0,
    };
    g.formula(rng, depth)
}

struct FormulaGen<'a> {
    sig: &'a Signature,
    scope: Vec<Term>,
    counter: usize,
}

impl FormulaGen<'_> {
    fn fresh(&mut self, t: &TypeExpr) -> Term {
        self.counter += 1;
        let base = match t {
            TypeExpr::E1 => "x",
            TypeExpr::E2 => "y",
            TypeExpr::Tuple(_) => "X",
        };
        Term::var(&format!("{base}{}", self.counter), t.clone())
    }

    fn candidates(&self, t: &TypeExpr) -> Vec<Term> {
        self.scope
            .iter()
            .chain(&self.sig.constants)
            .filter(|c| c.ty == *t)
            .cloned()
            .collect()
    }

    /// A term of type `t`, binding a new variable when none is available.
    fn term<R: Rng + ?Sized>(&mut self, rng: &mut R, t: &TypeExpr, binders: &mut Vec<(Term, bool)>) -> Term {
        let c = self.candidates(t);
        if !c.is_empty() && rng.gen_bool(0.8) {
            return c.choose(rng).unwrap().clone();
        }
        let v = self.fresh(t);
        binders.push((v.clone(), rng.gen_bool(0.5)));
        self.scope.push(v.clone());
        v
    }

    fn close(&mut self, mut f: Formula, binders: Vec<(Term, bool)>) -> Formula {
        for (v, universal) in binders.into_iter().rev() {
            self.scope.pop();
            f = if universal {
                Formula::forall(v, f)
            } else {
                Formula::exists(v, f)
            };
        }
        f
    }

    fn atomic<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Formula {
        let mut binders = Vec::new();
        let eq_types: Vec<TypeExpr> = self
            .sig
            .types()
            .into_iter()
            .filter(|t| *t != TypeExpr::E1)
            .collect();
        let f = if rng.gen_bool(0.15) {
            let t = eq_types.choose(rng).unwrap().clone();
            let a = self.term(rng, &t, &mut binders);
            let b = self.term(rng, &t, &mut binders);
            Formula::eq(a, b).expect("identity away from e1")
        } else {
            let t = self.sig.relation_types.choose(rng).unwrap().clone();
            let head = self.term(rng, &t, &mut binders);
            let args = t
                .components()
                .unwrap()
                .iter()
                .map(|c| self.term(rng, c, &mut binders))
                .collect();
            Formula::atom(head, args).expect("well typed")
        };
        self.close(f, binders)
    }

    fn formula<R: Rng + ?Sized>(&mut self, rng: &mut R, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            return self.atomic(rng);
        }
        match rng.gen_range(0..8) {
            0 => Formula::not(self.formula(rng, depth - 1)),
            1 => Formula::implies(self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            2 => Formula::and(self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            3 => Formula::or(self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            4 => Formula::iff(self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            _ => {
                let mut types: Vec<TypeExpr> = self.sig.types().into_iter().collect();
                types.retain(|t| t.depth() <= 1);
                let t = types.choose(rng).unwrap().clone();
                let v = self.fresh(&t);
                self.scope.push(v.clone());
                let body = self.formula(rng, depth - 1);
                self.scope.pop();
                if rng.gen_bool(0.5) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
        }
    }
}

/// A random frame with at most `n_m` atoms and `classical` classical
/// elements, holding every type of `types`.
pub fn random_frame<R: Rng + ?Sized>(
    rng: &mut R,
    n_m: usize,
    classical: usize,
    kind: FrameKind,
    types: &BTreeSet<TypeExpr>,
) -> Result<Arc<Frame>, ModelError> {
    let spec = FrameSpec::new(rng.gen_range(0..=n_m), rng.gen_range(1..=classical.max(1)), kind).with_types(types);
    Ok(Arc::new(build_frame(&spec)?))
}

/// Denotes every constant by a uniformly random element of its domain.
/// Constants whose domain is empty are left unassigned.
pub fn random_interpretation<R: Rng + ?Sized>(
    rng: &mut R,
    frame: &Arc<Frame>,
    constants: impl IntoIterator<Item = Term>,
) -> Result<Interpretation, ModelError> {
    let mut i = Interpretation::new(frame.clone());
    for c in constants {
        let size = frame.domain_size(&c.ty)?;
        if size > 0 {
            let e = rng.gen_range(0..size);
            i.assign(&c, &frame.value(&c.ty, e)?)?;
        }
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lang::{free_variables, parse_formula};

    #[test]
    fn closed_and_well_typed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = Signature::small();
        for _ in 0..200 {
            let f = random_closed_formula(&mut rng, &sig, 4);
            assert!(free_variables(&f).is_empty(), "{f}");
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let sig = Signature::small();
        let a: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..10).map(|_| random_closed_formula(&mut rng, &sig, 3).to_string()).collect()
        };
        let b: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..10).map(|_| random_closed_formula(&mut rng, &sig, 3).to_string()).collect()
        };
        assert_eq!(a, b);
    }
}

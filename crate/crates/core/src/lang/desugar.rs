//! Elimination of the defined connectives, the existential quantifier and identity.

use super::subst::fresh_name;
use super::syntax::{Formula, Identity, Term, TypeExpr};

/// Rewrites `f` into the primitive fragment (atoms, `!`, `->`, `forall`):
///
/// * `A & B`   becomes `!(A -> !B)`
/// * `A | B`   becomes `!A -> B`
/// * `A <-> B` becomes `(A -> B) & (B -> A)`, then as above
/// * `exists x . A` becomes `!forall x . !A`
/// * `U = V` at type `t` becomes `forall X^<t> . X(U) <-> X(V)`, then as above
///
/// Idempotent; primitive formulas come back unchanged.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(desugar(a)),
        Formula::Implies(a, b) => Formula::implies(desugar(a), desugar(b)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), desugar(a)),
        Formula::And(a, b) => conj(desugar(a), desugar(b)),
        Formula::Or(a, b) => Formula::implies(Formula::not(desugar(a)), desugar(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            conj(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
        }
        Formula::Exists(v, a) => Formula::not(Formula::forall(v.clone(), Formula::not(desugar(a)))),
        Formula::Eq(e) => desugar(&leibniz(e)),
    }
}

fn conj(a: Formula, b: Formula) -> Formula {
    Formula::not(Formula::implies(a, Formula::not(b)))
}

/// The defining formula of an identity: `forall X^<t> . X(U) <-> X(V)`, with
/// `X` named apart from both operands.
pub fn leibniz(e: &Identity) -> Formula {
    let avoid = [e.left().name.clone(), e.right().name.clone()].into_iter().collect();
    let pred = Term::var(&fresh_name("X", &avoid), TypeExpr::predicate_of(e.ty()));
    let holds = |t: &Term| Formula::atom(pred.clone(), vec![t.clone()]).expect("well-typed by construction");
    Formula::forall(pred.clone(), Formula::iff(holds(e.left()), holds(e.right())))
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_formula;
    use super::super::subst::alpha_eq;
    use super::*;

    #[test]
    fn identity_expands_to_leibniz() {
        let f = parse_formula("c^e2 = d^e2").unwrap();
        let expected = parse_formula("forall X^<e2> . X(c^e2) <-> X(d^e2)").unwrap();
        assert_eq!(desugar(&f), desugar(&expected));
        assert!(desugar(&f).is_primitive());
    }

    #[test]
    fn identity_predicate_is_named_apart() {
        let f = parse_formula("X^e2 = c^e2").unwrap();
        let Formula::Eq(e) = &f else { panic!() };
        let Formula::Forall(v, _) = leibniz(e) else { panic!() };
        assert_eq!(&*v.name, "X1");
    }

    #[test]
    fn defined_connectives() {
        let f = parse_formula("exists x^e1 . P^<e1>(x)").unwrap();
        assert_eq!(desugar(&f), parse_formula("!forall x^e1 . !P^<e1>(x)").unwrap());
        let f = parse_formula("A^<e2>(a^e2) | A(b^e2)").unwrap();
        assert_eq!(desugar(&f), parse_formula("!A^<e2>(a^e2) -> A(b^e2)").unwrap());
        let f = parse_formula("A^<e2>(a^e2) & A(b^e2)").unwrap();
        assert_eq!(desugar(&f), parse_formula("!(A^<e2>(a^e2) -> !A(b^e2))").unwrap());
    }

    #[test]
    fn idempotent() {
        let f = parse_formula("forall y^e2 . (exists x^e2 . x = y) <-> A^<e2>(y) | !A(y)").unwrap();
        let once = desugar(&f);
        assert!(once.is_primitive());
        assert_eq!(desugar(&once), once);
        assert!(alpha_eq(&desugar(&once), &once));
    }
}

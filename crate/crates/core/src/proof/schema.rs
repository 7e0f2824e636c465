//! Recognizers and builders for the axiom schemata A2, A3, A4 and choice.
//!
//! Matching runs on desugared formulas and is insensitive to the names of
//! bound variables.

use std::fmt;

use crate::lang::{
    alpha_eq, desugar, occurs_free, substitute, Formula, LangError, SubstMode, Term, TypeExpr,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    A2,
    A3,
    A4,
    Choice,
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schema::A2 => "A2",
            Schema::A3 => "A3",
            Schema::A4 => "A4",
            Schema::Choice => "CHOICE",
        })
    }
}

/// The first side condition or shape requirement a formula violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch(pub String);

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, Mismatch> {
    Err(Mismatch(msg.into()))
}

/// Checks that `f` is an instance of `schema`. The formula is desugared first.
pub fn match_axiom(schema: Schema, f: &Formula) -> Result<(), Mismatch> {
    let f = desugar(f);
    match schema {
        Schema::A2 => match_a2(&f),
        Schema::A3 => match_a3(&f),
        Schema::A4 => match_a4(&f),
        Schema::Choice => match_choice(&f),
    }
}

/// `!forall v . !body`, the desugared existential.
pub fn as_exists(f: &Formula) -> Option<(&Term, &Formula)> {
    match f {
        Formula::Not(inner) => match &**inner {
            Formula::Forall(v, body) => match &**body {
                Formula::Not(b) => Some((v, b)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// `!((a -> b) -> !(b -> a))`, the desugared biconditional.
pub fn as_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::Not(inner) = f else { return None };
    let Formula::Implies(left, right) = &**inner else { return None };
    let Formula::Implies(a, b) = &**left else { return None };
    let Formula::Not(right) = &**right else { return None };
    let Formula::Implies(b2, a2) = &**right else { return None };
    (a == a2 && b == b2).then_some((&**a, &**b))
}

fn match_a2(f: &Formula) -> Result<(), Mismatch> {
    let shape = "A2 has the shape forall X . (A -> B) -> (A -> forall X . B)";
    let Formula::Implies(lhs, rhs) = f else { return fail(shape) };
    let Formula::Forall(x, body) = &**lhs else { return fail(shape) };
    let Formula::Implies(a, b) = &**body else { return fail(shape) };
    let Formula::Implies(a2, gen) = &**rhs else { return fail(shape) };
    let Formula::Forall(x2, b2) = &**gen else { return fail(shape) };
    if occurs_free(x, a) {
        return fail(format!("{} free in antecedent", x.name));
    }
    if !alpha_eq(a, a2) {
        return fail("A2 antecedents differ");
    }
    if !alpha_eq(&Formula::forall(x.clone(), (**b).clone()), &Formula::forall(x2.clone(), (**b2).clone())) {
        return fail("A2 consequents differ");
    }
    Ok(())
}

fn match_a3(f: &Formula) -> Result<(), Mismatch> {
    let shape = "A3 has the shape forall X . A(X) -> A(U)";
    let Formula::Implies(lhs, conclusion) = f else { return fail(shape) };
    let Formula::Forall(x, body) = &**lhs else { return fail(shape) };
    let mut pairs = Vec::new();
    let mut found = None;
    walk_instance(body, conclusion, x, &mut pairs, &mut found)?;
    let u = found.unwrap_or_else(|| x.clone());
    match substitute(body, x, &u, SubstMode::Strict) {
        Ok(instance) if alpha_eq(&instance, conclusion) => Ok(()),
        Ok(_) => fail("conclusion is not an instance of the quantified formula"),
        Err(LangError::NotFreeFor { term, var }) => fail(format!("{term} is not free for {var}")),
        Err(e) => fail(e.to_string()),
    }
}

/// Walks `a` and `c` in parallel, collecting the term `c` has wherever `a`
/// has a free occurrence of `x`.
fn walk_instance(
    a: &Formula,
    c: &Formula,
    x: &Term,
    pairs: &mut Vec<(Term, Term)>,
    found: &mut Option<Term>,
) -> Result<(), Mismatch> {
    let differ = || fail("conclusion is not an instance of the quantified formula");
    match (a, c) {
        (Formula::Atom(aa), Formula::Atom(ca)) => {
            if aa.args().len() != ca.args().len() {
                return differ();
            }
            for (ta, tc) in aa.terms().zip(ca.terms()) {
                let a_bound = pairs.iter().rev().find(|(l, _)| l == ta);
                let c_bound = pairs.iter().rev().find(|(_, r)| r == tc);
                match (a_bound, c_bound) {
                    (Some((l, r)), Some((l2, r2))) if l == l2 && r == r2 => {}
                    (Some(_), _) => return differ(),
                    (None, Some(_)) if ta == x => {
                        return fail(format!("{tc} is not free for {x}"));
                    }
                    (None, Some(_)) => return differ(),
                    (None, None) if ta == x => {
                        if tc.ty != x.ty {
                            return fail(format!("{tc} is not of the type of {x}"));
                        }
                        match found {
                            Some(u) if u != tc => return fail(format!("{x} is replaced by both {u} and {tc}")),
                            _ => *found = Some(tc.clone()),
                        }
                    }
                    (None, None) if ta == tc => {}
                    (None, None) => return differ(),
                }
            }
            Ok(())
        }
        (Formula::Not(a), Formula::Not(c)) => walk_instance(a, c, x, pairs, found),
        (Formula::Implies(a1, a2), Formula::Implies(c1, c2)) => {
            walk_instance(a1, c1, x, pairs, found)?;
            walk_instance(a2, c2, x, pairs, found)
        }
        (Formula::Forall(va, ba), Formula::Forall(vc, bc)) if va.ty == vc.ty => {
            pairs.push((va.clone(), vc.clone()));
            let r = walk_instance(ba, bc, x, pairs, found);
            pairs.pop();
            r
        }
        _ => differ(),
    }
}

fn match_a4(f: &Formula) -> Result<(), Mismatch> {
    let shape = "A4 has the shape exists Xi . forall X1 ... forall Xn . Xi(X1,...,Xn) <-> U";
    let Some((rel, mut body)) = as_exists(f) else { return fail(shape) };
    let Some(components) = rel.ty.components() else {
        return fail(format!("{rel} is not of a relation type"));
    };
    let mut vars: Vec<&Term> = Vec::with_capacity(components.len());
    for t in components {
        let Formula::Forall(v, inner) = body else { return fail(shape) };
        if v.ty != *t {
            return fail(format!("{v} does not match component type {t} of {rel}"));
        }
        if vars.contains(&v) || v == rel {
            return fail(format!("{v} is quantified twice"));
        }
        vars.push(v);
        body = inner;
    }
    let Some((lhs, defining)) = as_iff(body) else { return fail(shape) };
    let Formula::Atom(atom) = lhs else { return fail(shape) };
    if atom.head() != rel || atom.args().iter().zip(&vars).any(|(a, v)| a != *v) {
        return fail(format!("left side must be {}({})", rel.name, names(&vars)));
    }
    if occurs_free(rel, defining) {
        return fail(format!("{} free in the comprehension formula", rel.name));
    }
    Ok(())
}

fn names(vars: &[&Term]) -> String {
    vars.iter().map(|v| v.name.to_string()).collect::<Vec<_>>().join(",")
}

fn match_choice(f: &Formula) -> Result<(), Mismatch> {
    let Formula::Forall(z, _) = f else {
        return fail("choice begins with forall Z^<t1,t2>");
    };
    let (t1, t2) = match z.ty.components() {
        Some([t1, t2]) => (t1, t2),
        _ => return fail(format!("{z} is not of a binary relation type")),
    };
    if *t1 == TypeExpr::E1 || *t2 == TypeExpr::E1 {
        return fail("choice does not range over e1");
    }
    let expected = desugar(&choice_instance(t1, t2).map_err(|e| Mismatch(e.to_string()))?);
    if alpha_eq(f, &expected) {
        Ok(())
    } else {
        fail(format!("not the choice instance at types {t1}, {t2}"))
    }
}

/// The weakened choice schema at component types `t1`, `t2` (both other than `e1`):
///
/// ```text
/// forall Z1 . exists Z2 .
///   (forall X1 . (exists Y1 . Z1(X1,Y1)) -> exists Y1 . Z2(X1,Y1) & Z1(X1,Y1))
///   -> forall X1 . forall X2 . forall Y1 . forall Y2 . Z2(X1,Y1) & Z2(X1,Y2) -> Y1 = Y2
/// ```
pub fn choice_instance(t1: &TypeExpr, t2: &TypeExpr) -> Result<Formula, LangError> {
    if *t1 == TypeExpr::E1 || *t2 == TypeExpr::E1 {
        return Err(LangError::IdentityAtE1);
    }
    let rel = TypeExpr::Tuple(vec![t1.clone(), t2.clone()]);
    let z1 = Term::var("Z1", rel.clone());
    let z2 = Term::var("Z2", rel);
    let x1 = Term::var("X1", t1.clone());
    let x2 = Term::var("X2", t1.clone());
    let y1 = Term::var("Y1", t2.clone());
    let y2 = Term::var("Y2", t2.clone());
    let app = |z: &Term, x: &Term, y: &Term| Formula::atom(z.clone(), vec![x.clone(), y.clone()]);

    let total = Formula::forall(
        x1.clone(),
        Formula::implies(
            Formula::exists(y1.clone(), app(&z1, &x1, &y1)?),
            Formula::exists(y1.clone(), Formula::and(app(&z2, &x1, &y1)?, app(&z1, &x1, &y1)?)),
        ),
    );
    let functional = Formula::forall(
        x1.clone(),
        Formula::forall(
            x2,
            Formula::forall(
                y1.clone(),
                Formula::forall(
                    y2.clone(),
                    Formula::implies(
                        Formula::and(app(&z2, &x1, &y1)?, app(&z2, &x1, &y2)?),
                        Formula::eq(y1, y2)?,
                    ),
                ),
            ),
        ),
    );
    Ok(Formula::forall(z1, Formula::exists(z2, Formula::implies(total, functional))))
}

/// `forall x . (a -> b) -> (a -> forall x . b)`; fails when `x` is free in `a`.
pub fn a2_instance(x: &Term, a: &Formula, b: &Formula) -> Result<Formula, Mismatch> {
    if occurs_free(x, a) {
        return fail(format!("{} free in antecedent", x.name));
    }
    Ok(Formula::implies(
        Formula::forall(x.clone(), Formula::implies(a.clone(), b.clone())),
        Formula::implies(a.clone(), Formula::forall(x.clone(), b.clone())),
    ))
}

/// `forall x . a -> a[x := u]`; fails when `u` is not free for `x`.
pub fn a3_instance(x: &Term, a: &Formula, u: &Term) -> Result<Formula, Mismatch> {
    let instance = substitute(a, x, u, SubstMode::Strict).map_err(|e| Mismatch(e.to_string()))?;
    Ok(Formula::implies(Formula::forall(x.clone(), a.clone()), instance))
}

/// `exists rel . forall v1 ... forall vn . rel(v1,...,vn) <-> u`.
pub fn a4_instance(rel: &Term, vars: &[Term], u: &Formula) -> Result<Formula, Mismatch> {
    if occurs_free(rel, u) {
        return fail(format!("{} free in the comprehension formula", rel.name));
    }
    let head = Formula::atom(rel.clone(), vars.to_vec()).map_err(|e| Mismatch(e.to_string()))?;
    let body = vars
        .iter()
        .rev()
        .fold(Formula::iff(head, u.clone()), |acc, v| Formula::forall(v.clone(), acc));
    Ok(Formula::exists(rel.clone(), body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, parse_type};

    fn check(schema: Schema, s: &str) -> Result<(), Mismatch> {
        match_axiom(schema, &parse_formula(s).unwrap())
    }

    #[test]
    fn a3_examples() {
        assert_eq!(check(Schema::A3, "(forall x^e1 . P^<e1>(x)) -> P(c^e1)"), Ok(()));
        assert_eq!(check(Schema::A3, "(forall x^e1 . P^<e1>(x)) -> P(x)"), Ok(()));
        assert!(check(Schema::A3, "(forall x^e1 . P^<e1>(x)) -> Q^<e1>(c^e1)").is_err());
        assert!(check(Schema::A3, "(forall x^e1 . R^<e1,e1>(x, x)) -> R(c^e1, d^e1)").is_err());
        // vacuous quantification: any conclusion equal to the body
        assert_eq!(check(Schema::A3, "(forall x^e1 . P^<e1>(c^e1)) -> P(c)"), Ok(()));
    }

    #[test]
    fn a3_rejects_capture() {
        let err = check(
            Schema::A3,
            "(forall x^e1 . forall y^e1 . R^<e1,e1>(x, y)) -> forall y^e1 . R(y, y)",
        )
        .unwrap_err();
        assert!(err.0.contains("not free for"), "{err}");
    }

    #[test]
    fn a3_up_to_renaming() {
        let s = "(forall x^e1 . forall y^e2 . S^<e1,e2>(x, y)) -> forall z^e2 . S(c^e1, z)";
        assert_eq!(check(Schema::A3, s), Ok(()));
    }

    #[test]
    fn a2_examples() {
        let good = "(forall x^e1 . A^<e2>(c^e2) -> P^<e1>(x)) -> A(c) -> forall x^e1 . P(x)";
        assert_eq!(check(Schema::A2, good), Ok(()));
        let renamed = "(forall x^e1 . A^<e2>(c^e2) -> P^<e1>(x)) -> A(c) -> forall y^e1 . P(y)";
        assert_eq!(check(Schema::A2, renamed), Ok(()));
        let bad = "(forall x^e1 . P^<e1>(x) -> Q^<e1>(x)) -> P(x) -> forall x^e1 . Q(x)";
        assert_eq!(check(Schema::A2, bad), Err(Mismatch("x free in antecedent".into())));
    }

    #[test]
    fn a4_examples() {
        assert_eq!(
            check(Schema::A4, "exists F^<e1> . forall x^e1 . F(x) <-> P^<e1>(x)"),
            Ok(())
        );
        assert_eq!(
            check(
                Schema::A4,
                "exists F^<e1,e2> . forall x^e1 . forall y^e2 . F(x, y) <-> P^<e1>(x) & A^<e2>(y)"
            ),
            Ok(())
        );
        let err = check(Schema::A4, "exists F^<e1> . forall x^e1 . F(x) <-> !F(x)").unwrap_err();
        assert!(err.0.contains("free in the comprehension formula"));
        assert!(check(Schema::A4, "exists F^<e1> . forall x^e1 . F(x) -> P^<e1>(x)").is_err());
        assert!(check(Schema::A4, "exists F^<e2,e2> . forall x^e2 . forall y^e2 . F(y, x) <-> A^<e2>(x)").is_err());
    }

    #[test]
    fn choice_examples() {
        let e2 = TypeExpr::E2;
        let inst = choice_instance(&e2, &e2).unwrap();
        assert_eq!(match_axiom(Schema::Choice, &inst), Ok(()));
        let p1 = parse_type("<e1>").unwrap();
        let inst = choice_instance(&p1, &e2).unwrap();
        assert_eq!(match_axiom(Schema::Choice, &inst), Ok(()));
        assert!(choice_instance(&TypeExpr::E1, &e2).is_err());
        let other = choice_instance(&e2, &p1).unwrap();
        let Formula::Forall(_, body) = &other else { panic!() };
        let swapped = Formula::forall(Term::var("Z1", parse_type("<e2,e2>").unwrap()), (**body).clone());
        assert!(match_axiom(Schema::Choice, &swapped).is_err());
    }

    #[test]
    fn builders_agree_with_matchers() {
        let f = parse_formula("R^<e1,e1>(x^e1, y^e1)").unwrap();
        let x = Term::var("x", TypeExpr::E1);
        let c = Term::constant("c", TypeExpr::E1);
        assert_eq!(match_axiom(Schema::A3, &a3_instance(&x, &f, &c).unwrap()), Ok(()));
        let a = parse_formula("A^<e2>(c^e2)").unwrap();
        assert_eq!(match_axiom(Schema::A2, &a2_instance(&x, &a, &f).unwrap()), Ok(()));
        assert!(a2_instance(&x, &f, &a).is_err());
        let rel = Term::var("F", parse_type("<e1>").unwrap());
        assert_eq!(match_axiom(Schema::A4, &a4_instance(&rel, &[x], &f).unwrap()), Ok(()));
    }
}

//! Free variables, capture-avoiding substitution and alpha-equivalence.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::syntax::{Formula, Term};
use super::LangError;

/// Terms with at least one free occurrence: free variables and constants.
pub fn free_terms(f: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    collect_free(f, &mut Vec::new(), &mut out);
    out
}

/// Variables with at least one free occurrence.
pub fn free_variables(f: &Formula) -> BTreeSet<Term> {
    free_terms(f).into_iter().filter(Term::is_var).collect()
}

pub fn occurs_free(v: &Term, f: &Formula) -> bool {
    match f {
        Formula::Atom(a) => a.terms().any(|t| t == v),
        Formula::Eq(e) => e.left() == v || e.right() == v,
        Formula::Not(a) => occurs_free(v, a),
        Formula::Forall(w, a) | Formula::Exists(w, a) => w != v && occurs_free(v, a),
        Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
            occurs_free(v, a) || occurs_free(v, b)
        }
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<Term>, out: &mut BTreeSet<Term>) {
    let mut note = |t: &Term, bound: &Vec<Term>| {
        if !bound.contains(t) {
            out.insert(t.clone());
        }
    };
    match f {
        Formula::Atom(a) => a.terms().for_each(|t| note(t, bound)),
        Formula::Eq(e) => {
            note(e.left(), bound);
            note(e.right(), bound);
        }
        Formula::Not(a) => collect_free(a, bound, out),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            bound.push(v.clone());
            collect_free(a, bound, out);
            bound.pop();
        }
        Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstMode {
    /// Fail when the substituted term would be captured.
    Strict,
    /// Rename the capturing binder instead.
    Rename,
}

/// Replaces the free occurrences of variable `v` by `u`.
pub fn substitute(f: &Formula, v: &Term, u: &Term, mode: SubstMode) -> Result<Formula, LangError> {
    if !v.is_var() {
        return Err(LangError::NotAVariable(v.to_string()));
    }
    if v.ty != u.ty {
        return Err(LangError::TypeMismatch {
            context: format!("substitution of {u} for {v}"),
            expected: v.ty.clone(),
            found: u.ty.clone(),
        });
    }
    subst(f, v, u, mode)
}

/// True iff no free occurrence of `v` in `f` lies in the scope of a binder of `u`.
pub fn is_free_for(u: &Term, v: &Term, f: &Formula) -> bool {
    substitute(f, v, u, SubstMode::Strict).is_ok()
}

fn subst(f: &Formula, v: &Term, u: &Term, mode: SubstMode) -> Result<Formula, LangError> {
    let swap = |t: &Term| if t == v { u.clone() } else { t.clone() };
    Ok(match f {
        Formula::Atom(a) => Formula::Atom(a.map_terms(swap)),
        Formula::Eq(e) => Formula::Eq(e.map_terms(swap)),
        Formula::Not(a) => Formula::not(subst(a, v, u, mode)?),
        Formula::Implies(a, b) => Formula::implies(subst(a, v, u, mode)?, subst(b, v, u, mode)?),
        Formula::And(a, b) => Formula::and(subst(a, v, u, mode)?, subst(b, v, u, mode)?),
        Formula::Or(a, b) => Formula::or(subst(a, v, u, mode)?, subst(b, v, u, mode)?),
        Formula::Iff(a, b) => Formula::iff(subst(a, v, u, mode)?, subst(b, v, u, mode)?),
        Formula::Forall(w, body) | Formula::Exists(w, body) => {
            let rebuild = |w: Term, body: Formula| match f {
                Formula::Forall(..) => Formula::forall(w, body),
                _ => Formula::exists(w, body),
            };
            if w == v || !occurs_free(v, body) {
                return Ok(f.clone());
            }
            if w == u {
                match mode {
                    SubstMode::Strict => {
                        return Err(LangError::NotFreeFor {
                            term: u.to_string(),
                            var: v.to_string(),
                        })
                    }
                    SubstMode::Rename => {
                        let mut avoid = body.names();
                        avoid.insert(u.name.clone());
                        avoid.insert(v.name.clone());
                        let fresh = w.renamed(&fresh_name(&w.name, &avoid));
                        let body = subst(body, w, &fresh, mode)?;
                        return Ok(rebuild(fresh.clone(), subst(&body, v, u, mode)?));
                    }
                }
            }
            rebuild(w.clone(), subst(body, v, u, mode)?)
        }
    })
}

/// `base`, or `base` followed by the smallest number making it unused.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Arc<str>>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n.as_str()))
        .unwrap()
}

/// Renames bound variables to positional names that no parsed formula can
/// contain, so alpha-equivalent formulas become structurally equal.
pub fn alpha_canonical(f: &Formula) -> Formula {
    canon(f, &mut Vec::new())
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_canonical(a) == alpha_canonical(b)
}

fn canon(f: &Formula, env: &mut Vec<(Term, Term)>) -> Formula {
    let swap = |t: &Term| {
        env.iter()
            .rev()
            .find(|(from, _)| from == t)
            .map(|(_, to)| to.clone())
            .unwrap_or_else(|| t.clone())
    };
    match f {
        Formula::Atom(a) => Formula::Atom(a.map_terms(swap)),
        Formula::Eq(e) => Formula::Eq(e.map_terms(swap)),
        Formula::Not(a) => Formula::not(canon(a, env)),
        Formula::Implies(a, b) => Formula::implies(canon(a, env), canon(b, env)),
        Formula::And(a, b) => Formula::and(canon(a, env), canon(b, env)),
        Formula::Or(a, b) => Formula::or(canon(a, env), canon(b, env)),
        Formula::Iff(a, b) => Formula::iff(canon(a, env), canon(b, env)),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let fresh = v.renamed(&format!("·{}", env.len()));
            env.push((v.clone(), fresh.clone()));
            let body = canon(a, env);
            env.pop();
            match f {
                Formula::Forall(..) => Formula::forall(fresh, body),
                _ => Formula::exists(fresh, body),
            }
        }
    }
}

/// Renames every bound variable to a fresh name built by `rename`, skipping
/// the outermost binder when `keep_top` is set. Names are kept distinct from
/// all names already in the formula.
pub fn rename_bound(f: &Formula, keep_top: bool, rename: &mut impl FnMut(&str) -> String) -> Formula {
    let mut avoid = f.names();
    let mut env = Vec::new();
    if keep_top {
        if let Formula::Forall(v, body) = f {
            return Formula::forall(v.clone(), rename_rec(body, &mut env, &mut avoid, rename));
        }
    }
    rename_rec(f, &mut env, &mut avoid, rename)
}

fn rename_rec(
    f: &Formula,
    env: &mut Vec<(Term, Term)>,
    avoid: &mut BTreeSet<Arc<str>>,
    rename: &mut impl FnMut(&str) -> String,
) -> Formula {
    let swap = |t: &Term, env: &Vec<(Term, Term)>| {
        env.iter()
            .rev()
            .find(|(from, _)| from == t)
            .map(|(_, to)| to.clone())
            .unwrap_or_else(|| t.clone())
    };
    match f {
        Formula::Atom(a) => Formula::Atom(a.map_terms(|t| swap(t, env))),
        Formula::Eq(e) => Formula::Eq(e.map_terms(|t| swap(t, env))),
        Formula::Not(a) => Formula::not(rename_rec(a, env, avoid, rename)),
        Formula::Implies(a, b) => {
            Formula::implies(rename_rec(a, env, avoid, rename), rename_rec(b, env, avoid, rename))
        }
        Formula::And(a, b) => Formula::and(rename_rec(a, env, avoid, rename), rename_rec(b, env, avoid, rename)),
        Formula::Or(a, b) => Formula::or(rename_rec(a, env, avoid, rename), rename_rec(b, env, avoid, rename)),
        Formula::Iff(a, b) => Formula::iff(rename_rec(a, env, avoid, rename), rename_rec(b, env, avoid, rename)),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let name = fresh_name(&rename(&v.name), avoid);
            avoid.insert(name.as_str().into());
            let fresh = v.renamed(&name);
            env.push((v.clone(), fresh.clone()));
            let body = rename_rec(a, env, avoid, rename);
            env.pop();
            match f {
                Formula::Forall(..) => Formula::forall(fresh, body),
                _ => Formula::exists(fresh, body),
            }
        }
    }
}

/// Universal closure over the free variables, innermost binder last in term order.
pub fn universal_closure(f: &Formula) -> Formula {
    free_variables(f)
        .into_iter()
        .rev()
        .fold(f.clone(), |acc, v| Formula::forall(v, acc))
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_formula;
    use super::super::syntax::TypeExpr;
    use super::*;

    fn x() -> Term {
        Term::var("x", TypeExpr::E1)
    }

    fn c() -> Term {
        Term::constant("c", TypeExpr::E1)
    }

    #[test]
    fn free_variable_examples() {
        let f = parse_formula("P^<e1>(x^e1)").unwrap();
        assert_eq!(free_variables(&f), [x()].into());
        let f = parse_formula("forall x^e1 . P^<e1>(x)").unwrap();
        assert!(free_variables(&f).is_empty());
        let f = parse_formula("forall x^e1 . R^<e1,e1>(x, y^e1)").unwrap();
        assert_eq!(free_variables(&f), [Term::var("y", TypeExpr::E1)].into());
    }

    #[test]
    fn substitution_examples() {
        let f = parse_formula("P^<e1>(x^e1)").unwrap();
        let g = substitute(&f, &x(), &c(), SubstMode::Strict).unwrap();
        assert_eq!(g, parse_formula("P^<e1>(c^e1)").unwrap());

        let f = parse_formula("forall x^e1 . P^<e1>(x)").unwrap();
        assert_eq!(substitute(&f, &x(), &c(), SubstMode::Strict).unwrap(), f);

        let f = parse_formula("forall y^e1 . R^<e1,e1>(x^e1, y)").unwrap();
        let y = Term::var("y", TypeExpr::E1);
        assert!(matches!(
            substitute(&f, &x(), &y, SubstMode::Strict),
            Err(LangError::NotFreeFor { .. })
        ));
        let g = substitute(&f, &x(), &y, SubstMode::Rename).unwrap();
        assert_eq!(g, parse_formula("forall y1^e1 . R^<e1,e1>(y^e1, y1)").unwrap());

        assert!(matches!(
            substitute(&f, &x(), &Term::constant("d", TypeExpr::E2), SubstMode::Strict),
            Err(LangError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn alpha_equivalence() {
        let a = parse_formula("forall x^e1 . R^<e1,e1>(x, y^e1)").unwrap();
        let b = parse_formula("forall z^e1 . R^<e1,e1>(z, y^e1)").unwrap();
        let c = parse_formula("forall y^e1 . R^<e1,e1>(y, y)").unwrap();
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }

    #[test]
    fn closure_binds_all_free_variables() {
        let f = parse_formula("R^<e1,e2>(x^e1, y^e2)").unwrap();
        let g = universal_closure(&f);
        assert!(free_variables(&g).is_empty());
        assert_eq!(g.to_string(), "forall x^e1 . forall y^e2 . R^<e1,e2>(x, y)");
    }
}

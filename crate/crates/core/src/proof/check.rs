use std::collections::BTreeSet;
use std::fmt;

use crate::lang::{alpha_eq, desugar, occurs_free, Formula, Term};

use super::schema::{match_axiom, Schema};
use super::taut::is_tautology_instance;

/// Why a proof line is allowed. Line and premise numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Justification {
    A1,
    A2,
    A3,
    A4,
    Choice,
    Premise(usize),
    /// `MP(i, j)`: line `i` is `A` and line `j` is `A -> B`.
    MP(usize, usize),
    Gen(usize, Term),
    /// Rewrites defined notation (identity, `&`, `|`, `<->`, `exists`) in line `i`.
    DefEq(usize),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::A1 => f.write_str("A1"),
            Justification::A2 => f.write_str("A2"),
            Justification::A3 => f.write_str("A3"),
            Justification::A4 => f.write_str("A4"),
            Justification::Choice => f.write_str("CHOICE"),
            Justification::Premise(k) => write!(f, "PREM {k}"),
            Justification::MP(i, j) => write!(f, "MP {i} {j}"),
            Justification::Gen(i, v) => write!(f, "GEN {i} {}", v.name),
            Justification::DefEq(i) => write!(f, "DEFEQ {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Proof {
    pub premises: Vec<Formula>,
    pub lines: Vec<Line>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted {
        lines: usize,
        /// Premises the conclusion depends on, 1-based.
        premises_used: BTreeSet<usize>,
    },
    Rejected { line: usize, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted { lines, .. } => write!(f, "accepted ({lines} lines)"),
            Verdict::Rejected { line, reason } => write!(f, "rejected at line {line}: {reason}"),
        }
    }
}

/// Checks every line in order and reports the first that fails.
pub fn check_proof(p: &Proof) -> Verdict {
    if p.lines.is_empty() {
        return Verdict::Rejected {
            line: 0,
            reason: "proof has no lines".into(),
        };
    }
    let premises: Vec<Formula> = p.premises.iter().map(desugar).collect();
    let mut done: Vec<Formula> = Vec::with_capacity(p.lines.len());
    let mut deps: Vec<BTreeSet<usize>> = Vec::with_capacity(p.lines.len());
    for (idx, line) in p.lines.iter().enumerate() {
        let n = idx + 1;
        let f = desugar(&line.formula);
        match check_line(&f, &line.justification, n, &premises, &p.premises, &done, &deps) {
            Ok(d) => deps.push(d),
            Err(reason) => return Verdict::Rejected { line: n, reason },
        }
        done.push(f);
    }
    Verdict::Accepted {
        lines: p.lines.len(),
        premises_used: deps.pop().unwrap_or_default(),
    }
}

fn check_line(
    f: &Formula,
    just: &Justification,
    n: usize,
    premises: &[Formula],
    raw_premises: &[Formula],
    done: &[Formula],
    deps: &[BTreeSet<usize>],
) -> Result<BTreeSet<usize>, String> {
    let earlier = |i: usize| -> Result<usize, String> {
        if i == 0 || i >= n {
            Err(format!("line {i} does not precede line {n}"))
        } else {
            Ok(i - 1)
        }
    };
    let axiom = |s: Schema| match_axiom(s, f).map(|_| BTreeSet::new()).map_err(|m| m.0);
    match just {
        Justification::A1 => match is_tautology_instance(f) {
            Ok(true) => Ok(BTreeSet::new()),
            Ok(false) => Err("not a tautology instance".into()),
            Err(e) => Err(e.to_string()),
        },
        Justification::A2 => axiom(Schema::A2),
        Justification::A3 => axiom(Schema::A3),
        Justification::A4 => axiom(Schema::A4),
        Justification::Choice => axiom(Schema::Choice),
        Justification::Premise(k) => {
            let Some(prem) = k.checked_sub(1).and_then(|i| premises.get(i)) else {
                return Err(format!("no premise {k}"));
            };
            if alpha_eq(prem, f) {
                Ok(BTreeSet::from([*k]))
            } else {
                Err(format!("line differs from premise {k}"))
            }
        }
        Justification::MP(i, j) => {
            let (a, imp) = (earlier(*i)?, earlier(*j)?);
            match &done[imp] {
                Formula::Implies(ante, cons) if alpha_eq(ante, &done[a]) && alpha_eq(cons, f) => {
                    Ok(deps[a].union(&deps[imp]).copied().collect())
                }
                Formula::Implies(ante, _) if !alpha_eq(ante, &done[a]) => {
                    Err(format!("antecedent of line {j} differs from line {i}"))
                }
                Formula::Implies(..) => Err(format!("line differs from the consequent of line {j}")),
                _ => Err(format!("line {j} is not an implication")),
            }
        }
        Justification::Gen(i, v) => {
            let src = earlier(*i)?;
            if !v.is_var() {
                return Err(format!("{v} is not a variable"));
            }
            if let Some(k) = deps[src].iter().find(|&&k| occurs_free(v, &raw_premises[k - 1])) {
                return Err(format!("{} free in premise {k}", v.name));
            }
            if alpha_eq(&Formula::forall(v.clone(), done[src].clone()), f) {
                Ok(deps[src].clone())
            } else {
                Err(format!("line is not the generalization of line {i} over {}", v.name))
            }
        }
        Justification::DefEq(i) => {
            let src = earlier(*i)?;
            if alpha_eq(&done[src], f) {
                Ok(deps[src].clone())
            } else {
                Err(format!("line does not unfold to line {i}"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula_in, Context, TypeExpr};

    fn proof(premises: &[&str], lines: &[(&str, Justification)]) -> Proof {
        let mut ctx = Context::new();
        Proof {
            premises: premises.iter().map(|s| parse_formula_in(s, &mut ctx).unwrap()).collect(),
            lines: lines
                .iter()
                .map(|(s, j)| Line {
                    formula: parse_formula_in(s, &mut ctx).unwrap(),
                    justification: j.clone(),
                })
                .collect(),
        }
    }

    #[test]
    fn single_tautology() {
        let p = proof(&[], &[("P^<e1>(x^e1) -> P(x)", Justification::A1)]);
        assert!(check_proof(&p).is_accepted());
    }

    #[test]
    fn modus_ponens_from_premises() {
        let p = proof(
            &["A^<e2>(c^e2)", "A(c) -> B^<e2>(c)"],
            &[
                ("A(c)", Justification::Premise(1)),
                ("A(c) -> B(c)", Justification::Premise(2)),
                ("B(c)", Justification::MP(1, 2)),
            ],
        );
        assert_eq!(
            check_proof(&p),
            Verdict::Accepted {
                lines: 3,
                premises_used: BTreeSet::from([1, 2])
            }
        );
        let swapped = proof(
            &["A^<e2>(c^e2)", "A(c) -> B^<e2>(c)"],
            &[
                ("A(c)", Justification::Premise(1)),
                ("A(c) -> B(c)", Justification::Premise(2)),
                ("B(c)", Justification::MP(2, 1)),
            ],
        );
        assert!(!check_proof(&swapped).is_accepted());
    }

    #[test]
    fn identity_reflexivity() {
        let x = Term::var("X", TypeExpr::Tuple(vec![TypeExpr::E2]));
        let p = proof(
            &[],
            &[
                ("X^<e2>(c^e2) -> X(c)", Justification::A1),
                ("(X^<e2>(c^e2) -> X(c)) & (X(c) -> X(c))", Justification::A1),
                ("forall X^<e2> . X(c^e2) <-> X(c)", Justification::Gen(2, x)),
                ("c^e2 = c", Justification::DefEq(3)),
            ],
        );
        assert!(check_proof(&p).is_accepted(), "{}", check_proof(&p));
    }

    #[test]
    fn generalization_guard() {
        let x = Term::var("x", TypeExpr::E1);
        let p = proof(
            &["P^<e1>(x^e1)"],
            &[
                ("P(x)", Justification::Premise(1)),
                ("forall x^e1 . P(x)", Justification::Gen(1, x.clone())),
            ],
        );
        assert_eq!(
            check_proof(&p),
            Verdict::Rejected {
                line: 2,
                reason: "x free in premise 1".into()
            }
        );
        let p = proof(&[], &[("P^<e1>(x^e1) -> P(x)", Justification::A1), ("forall x^e1 . P(x) -> P(x)", Justification::Gen(1, x))]);
        assert!(check_proof(&p).is_accepted());
    }

    #[test]
    fn forward_references_rejected() {
        let p = proof(&[], &[("P^<e1>(x^e1) -> P(x)", Justification::MP(1, 1))]);
        assert!(matches!(check_proof(&p), Verdict::Rejected { line: 1, .. }));
        assert!(!check_proof(&Proof::default()).is_accepted());
    }
}

//! Canonical printer. Output parses back to the same tree.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::subst::free_terms;
use super::syntax::{Formula, Term};

pub fn print_formula(f: &Formula) -> String {
    let mut ambiguous: BTreeMap<&str, usize> = BTreeMap::new();
    let free = free_terms(f);
    for t in &free {
        *ambiguous.entry(&t.name).or_insert(0) += 1;
    }
    let ambiguous: BTreeSet<String> = ambiguous
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|(name, _)| name.to_string())
        .collect();
    let mut p = Printer {
        out: String::new(),
        scopes: Vec::new(),
        seen: HashSet::new(),
        ambiguous,
    };
    p.formula(f, Prec::Top, true);
    p.out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Iff,
    Implies,
    Or,
    And,
    Unary,
}

struct Printer {
    out: String,
    scopes: Vec<Term>,
    seen: HashSet<Term>,
    ambiguous: BTreeSet<String>,
}

impl Printer {
    fn term(&mut self, t: &Term) {
        let innermost = self.scopes.iter().rev().find(|b| b.name == t.name);
        let annotate = match innermost {
            Some(b) if b == t => false,
            Some(_) => true,
            None => self.ambiguous.contains(&*t.name) || self.seen.insert(t.clone()),
        };
        self.out.push_str(&t.name);
        if annotate {
            self.out.push('^');
            self.out.push_str(&t.ty.to_string());
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn binary(&mut self, a: &Formula, op: &str, b: &Formula, prec: Prec, ctx: Prec, open: bool, right_assoc: bool) {
        let parens = ctx > prec;
        if parens {
            self.out.push('(');
        }
        let open_inner = parens || open;
        let (lp, rp) = if right_assoc {
            (next(prec), prec)
        } else {
            (prec, next(prec))
        };
        self.formula(a, lp, false);
        self.out.push(' ');
        self.out.push_str(op);
        self.out.push(' ');
        self.formula(b, rp, open_inner);
        if parens {
            self.out.push(')');
        }
    }

    fn quantifier(&mut self, word: &str, v: &Term, body: &Formula, open: bool) {
        if !open {
            self.out.push('(');
        }
        self.out.push_str(word);
        self.out.push(' ');
        self.out.push_str(&v.name);
        self.out.push('^');
        self.out.push_str(&v.ty.to_string());
        self.out.push_str(" . ");
        self.scopes.push(v.clone());
        self.formula(body, Prec::Top, true);
        self.scopes.pop();
        if !open {
            self.out.push(')');
        }
    }

    /// `open` is true when nothing follows this formula at the current
    /// nesting level, so a quantifier body may run to the end.
    fn formula(&mut self, f: &Formula, ctx: Prec, open: bool) {
        match f {
            Formula::Atom(a) => {
                self.term(a.head());
                self.out.push('(');
                for (i, t) in a.args().iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.term(t);
                }
                self.out.push(')');
            }
            Formula::Eq(e) => {
                self.term(e.left());
                self.out.push_str(" = ");
                self.term(e.right());
            }
            Formula::Not(a) => {
                self.out.push('!');
                self.formula(a, Prec::Unary, open);
            }
            Formula::Forall(v, b) => self.quantifier("forall", v, b, open),
            Formula::Exists(v, b) => self.quantifier("exists", v, b, open),
            Formula::Implies(a, b) => self.binary(a, "->", b, Prec::Implies, ctx, open, true),
            Formula::Iff(a, b) => self.binary(a, "<->", b, Prec::Iff, ctx, open, true),
            Formula::Or(a, b) => self.binary(a, "|", b, Prec::Or, ctx, open, false),
            Formula::And(a, b) => self.binary(a, "&", b, Prec::And, ctx, open, false),
        }
    }
}

fn next(p: Prec) -> Prec {
    match p {
        Prec::Top => Prec::Iff,
        Prec::Iff => Prec::Implies,
        Prec::Implies => Prec::Or,
        Prec::Or => Prec::And,
        Prec::And | Prec::Unary => Prec::Unary,
    }
}

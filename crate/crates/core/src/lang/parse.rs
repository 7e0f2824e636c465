//! Concrete syntax.
//!
//! ```text
//! type    := "e1" | "e2" | "<" type ("," type)* ">"
//! term    := name ["^" type]
//! formula := iff
//! iff     := imp ["<->" iff]                 right associative
//! imp     := or ["->" imp]                   right associative
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | quant | primary
//! quant   := ("forall" | "exists") name "^" type "." formula
//! primary := "(" formula ")" | term "(" term ("," term)* ")" | term "=" term
//! name    := [A-Za-z_][A-Za-z0-9_']*        except "forall", "exists"
//! ```
//!
//! A quantifier body extends as far right as possible. `#` starts a comment
//! that runs to the end of the line.
//!
//! A type annotation is needed only the first time a free name is used; later
//! occurrences, and occurrences of bound names, inherit it. An argument or an
//! identity operand with no annotation may also take its type from the
//! relation or from the other operand.
//!
//! Bound names are variables. A free name is a variable when it starts with
//! one of `u v w x y z U V W X Y Z` and a constant otherwise, unless a
//! [`Context`] declaration says otherwise.

use std::collections::{BTreeMap, BTreeSet};

use super::syntax::{Formula, Term, TermKind, TypeExpr};
use super::LangError;

/// Kind of a free name under the naming convention.
pub fn default_kind(name: &str) -> TermKind {
    match name.chars().next() {
        Some('u' | 'v' | 'w' | 'x' | 'y' | 'z' | 'U' | 'V' | 'W' | 'X' | 'Y' | 'Z') => TermKind::Var,
        _ => TermKind::Const,
    }
}

/// Free-name typing and kind declarations shared across the formulas of a file.
#[derive(Debug, Clone, Default)]
pub struct Context {
    free: BTreeMap<String, BTreeSet<Term>>,
    decls: BTreeMap<String, TermKind>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    /// Overrides the naming convention for `name`.
    pub fn declare(&mut self, name: &str, kind: TermKind) {
        self.decls.insert(name.to_string(), kind);
    }

    pub fn kind_of(&self, name: &str) -> TermKind {
        self.decls.get(name).copied().unwrap_or_else(|| default_kind(name))
    }

    /// Registers a free term so later unannotated uses resolve to it.
    pub fn register(&mut self, t: &Term) {
        self.free.entry(t.name.to_string()).or_default().insert(t.clone());
    }

    fn lookup(&self, name: &str) -> Option<&BTreeSet<Term>> {
        self.free.get(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Caret,
    Lt,
    Gt,
    Comma,
    LParen,
    RParen,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Equals,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Caret => "`^`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(input: &str, line0: usize) -> Result<Vec<Spanned>, LangError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, line0, 1);
    while i < chars.len() {
        let c = chars[i];
        let (sl, sc) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '^' => Some(Tok::Caret),
            '>' => Some(Tok::Gt),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '.' => Some(Tok::Dot),
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '=' => Some(Tok::Equals),
            '-' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Some(Tok::Arrow)
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                adv = 3;
                Some(Tok::DArrow)
            }
            '<' => Some(Tok::Lt),
            c if c == '_' || c.is_ascii_alphabetic() => {
                let start = i;
                while i + adv < chars.len() {
                    let d = chars[i + adv];
                    if d == '_' || d == '\'' || d.is_ascii_alphanumeric() {
                        adv += 1;
                    } else {
                        break;
                    }
                }
                Some(Tok::Ident(chars[start..start + adv].iter().collect()))
            }
            other => {
                return Err(LangError::Syntax {
                    line: sl,
                    col: sc,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        if let Some(tok) = tok {
            out.push(Spanned { tok, line: sl, col: sc });
        }
        i += adv;
        col += adv;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// An occurrence of a name before its type is known.
struct RawTerm {
    name: String,
    ty: Option<TypeExpr>,
    line: usize,
    col: usize,
}

struct Parser<'c> {
    toks: Vec<Spanned>,
    pos: usize,
    scopes: Vec<Term>,
    ctx: &'c mut Context,
}

impl<'c> Parser<'c> {
    fn new(input: &str, line0: usize, ctx: &'c mut Context) -> Result<Self, LangError> {
        Ok(Parser {
            toks: lex(input, line0)?,
            pos: 0,
            scopes: Vec::new(),
            ctx,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn error_at(&self, line: usize, col: usize, msg: impl Into<String>) -> LangError {
        LangError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn error(&self, msg: impl Into<String>) -> LangError {
        let (line, col) = self.here();
        self.error_at(line, col, msg)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), LangError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", want.describe(), self.peek().describe())))
        }
    }

    fn finish(&self) -> Result<(), LangError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe())))
        }
    }

    fn ty(&mut self) -> Result<TypeExpr, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "e1" || s == "e2" => {
                self.bump();
                Ok(if s == "e1" { TypeExpr::E1 } else { TypeExpr::E2 })
            }
            Tok::Lt => {
                self.bump();
                let mut comps = vec![self.ty()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    comps.push(self.ty()?);
                }
                self.expect(Tok::Gt)?;
                Ok(TypeExpr::Tuple(comps))
            }
            other => Err(self.error(format!("expected a type, found {}", other.describe()))),
        }
    }

    fn name(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "forall" && s != "exists" => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected a name, found {}", other.describe()))),
        }
    }

    fn raw_term(&mut self) -> Result<RawTerm, LangError> {
        let (line, col) = self.here();
        let name = self.name()?;
        let ty = if *self.peek() == Tok::Caret {
            self.bump();
            Some(self.ty()?)
        } else {
            None
        };
        Ok(RawTerm { name, ty, line, col })
    }

    /// Resolves an occurrence to a bound variable or a free term. `hint` is
    /// the type expected by the surrounding construct, if known.
    fn resolve(&mut self, raw: &RawTerm, hint: Option<&TypeExpr>) -> Result<Term, LangError> {
        let wanted = raw.ty.as_ref().or(hint);
        if let Some(t) = &raw.ty {
            if let Some(b) = self.scopes.iter().rev().find(|b| *b.name == *raw.name && b.ty == *t) {
                return Ok(b.clone());
            }
        } else if let Some(b) = self.scopes.iter().rev().find(|b| *b.name == *raw.name) {
            return Ok(b.clone());
        }
        if let Some(t) = &raw.ty {
            let term = Term {
                kind: self.ctx.kind_of(&raw.name),
                name: raw.name.as_str().into(),
                ty: t.clone(),
            };
            self.ctx.register(&term);
            return Ok(term);
        }
        match self.ctx.lookup(&raw.name) {
            Some(known) if known.len() == 1 => Ok(known.iter().next().unwrap().clone()),
            Some(known) if known.len() > 1 => {
                if let Some(t) = wanted.and_then(|w| known.iter().find(|k| k.ty == *w)) {
                    return Ok(t.clone());
                }
                Err(self.error_at(
                    raw.line,
                    raw.col,
                    format!("`{}` is used at several types; annotate it", raw.name),
                ))
            }
            _ => match wanted {
                Some(t) => {
                    let term = Term {
                        kind: self.ctx.kind_of(&raw.name),
                        name: raw.name.as_str().into(),
                        ty: t.clone(),
                    };
                    self.ctx.register(&term);
                    Ok(term)
                }
                None => Err(self.error_at(
                    raw.line,
                    raw.col,
                    format!("missing type annotation for `{}`", raw.name),
                )),
            },
        }
    }

    fn formula(&mut self) -> Result<Formula, LangError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, LangError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LangError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(q) if q == "forall" || q == "exists" => {
                self.bump();
                let name = self.name()?;
                if *self.peek() != Tok::Caret {
                    return Err(self.error(format!("bound variable `{name}` needs a type annotation")));
                }
                self.bump();
                let ty = self.ty()?;
                self.expect(Tok::Dot)?;
                let v = Term::var(&name, ty);
                self.scopes.push(v.clone());
                let body = self.formula();
                self.scopes.pop();
                let body = body?;
                Ok(if q == "forall" {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, LangError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        let (line, col) = self.here();
        let head = self.raw_term()?;
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let mut raw_args = vec![self.raw_term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    raw_args.push(self.raw_term()?);
                }
                self.expect(Tok::RParen)?;
                let head = self.resolve(&head, None)?;
                let comps = head.ty.components().map(<[TypeExpr]>::to_vec);
                let mut args = Vec::with_capacity(raw_args.len());
                for (i, raw) in raw_args.iter().enumerate() {
                    let hint = comps.as_ref().and_then(|c| c.get(i));
                    args.push(self.resolve(raw, hint)?);
                }
                Formula::atom(head, args).map_err(|e| self.error_at(line, col, e.to_string()))
            }
            Tok::Equals => {
                self.bump();
                let rhs = self.raw_term()?;
                let (l, r) = if head.ty.is_some() || rhs.ty.is_none() {
                    let l = self.resolve(&head, rhs.ty.as_ref())?;
                    let r = self.resolve(&rhs, Some(&l.ty))?;
                    (l, r)
                } else {
                    let r = self.resolve(&rhs, None)?;
                    let l = self.resolve(&head, Some(&r.ty))?;
                    (l, r)
                };
                Formula::eq(l, r).map_err(|e| match e {
                    LangError::IdentityAtE1 => LangError::IdentityAtE1,
                    e => self.error_at(line, col, e.to_string()),
                })
            }
            other => Err(self.error(format!(
                "expected `(` or `=` after `{}`, found {}",
                head.name,
                other.describe()
            ))),
        }
    }
}

pub fn parse_formula(input: &str) -> Result<Formula, LangError> {
    parse_formula_in(input, &mut Context::new())
}

/// Parses one formula, reading and extending the free-name table of `ctx`.
pub fn parse_formula_in(input: &str, ctx: &mut Context) -> Result<Formula, LangError> {
    parse_formula_at(input, 1, ctx)
}

/// As [`parse_formula_in`], reporting positions relative to `line`.
pub fn parse_formula_at(input: &str, line: usize, ctx: &mut Context) -> Result<Formula, LangError> {
    let mut p = Parser::new(input, line, ctx)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_type(input: &str) -> Result<TypeExpr, LangError> {
    let mut ctx = Context::new();
    let mut p = Parser::new(input, 1, &mut ctx)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Parses a standalone term; the annotation may be omitted only if `ctx`
/// already knows the name.
pub fn parse_term_in(input: &str, ctx: &mut Context) -> Result<Term, LangError> {
    let mut p = Parser::new(input, 1, ctx)?;
    let raw = p.raw_term()?;
    let t = p.resolve(&raw, None)?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(input: &str) -> Result<Term, LangError> {
    parse_term_in(input, &mut Context::new())
}

/// Parses a formula file: one formula per non-blank line, `#` comments, with
/// free-name types shared across lines.
pub fn parse_formula_file(input: &str) -> Result<Vec<Formula>, LangError> {
    let mut ctx = Context::new();
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_formula_at(body, i + 1, &mut ctx)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> TypeExpr {
        TypeExpr::predicate_of(&TypeExpr::E1)
    }

    #[test]
    fn types() {
        assert_eq!(parse_type("<e1>").unwrap(), p1());
        assert_eq!(
            parse_type("<<e1>, e2>").unwrap(),
            TypeExpr::Tuple(vec![p1(), TypeExpr::E2])
        );
        assert!(parse_type("<>").is_err());
        assert!(parse_type("e3").is_err());
    }

    #[test]
    fn quantified_atom_matches_hand_built_ast() {
        let f = parse_formula("forall X^<e1>. P^<e1>(X)").unwrap_err();
        // X^<e1> is not an argument of type e1.
        assert!(matches!(f, LangError::Syntax { .. }));

        let f = parse_formula("forall X^e1. P^<e1>(X)").unwrap();
        let x = Term::var("X", TypeExpr::E1);
        let p = Term::constant("P", p1());
        let expected = Formula::forall(x.clone(), Formula::atom(p, vec![x]).unwrap());
        assert_eq!(f, expected);
    }

    #[test]
    fn identity_at_e1_is_rejected() {
        let err = parse_formula("x^e1 = y^e1").unwrap_err();
        assert_eq!(err, LangError::IdentityAtE1);
        assert_eq!(err.to_string(), "identity undefined at type e1");
        let err = parse_formula("forall x^e1 . x = x").unwrap_err();
        assert_eq!(err, LangError::IdentityAtE1);
    }

    #[test]
    fn inference_and_kinds() {
        let f = parse_formula("P^<e1>(c) -> P(x)").unwrap();
        let Formula::Implies(a, b) = f else { panic!() };
        let Formula::Atom(a) = *a else { panic!() };
        let Formula::Atom(b) = *b else { panic!() };
        assert_eq!(a.args()[0], Term::constant("c", TypeExpr::E1));
        assert_eq!(b.args()[0], Term::var("x", TypeExpr::E1));
        assert!(parse_formula("P(x)").is_err());
        let f = parse_formula("c^e2 = d").unwrap();
        assert!(matches!(f, Formula::Eq(_)));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("!A^<e2>(c^e2) & A(c) | A(c) -> A(c) <-> A(c)").unwrap();
        assert!(matches!(f, Formula::Iff(..)));
        let Formula::Iff(l, _) = f else { unreachable!() };
        let Formula::Implies(l, _) = *l else { panic!() };
        let Formula::Or(l, _) = *l else { panic!() };
        let Formula::And(l, _) = *l else { panic!() };
        assert!(matches!(*l, Formula::Not(_)));

        let f = parse_formula("A^<e2>(c^e2) -> A(c) -> A(c)").unwrap();
        let Formula::Implies(_, r) = f else { panic!() };
        assert!(matches!(*r, Formula::Implies(..)));
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = parse_formula("forall x^e2 . A^<e2>(x) -> A(x)").unwrap();
        let Formula::Forall(_, body) = f else { panic!() };
        assert!(matches!(*body, Formula::Implies(..)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("P^<e1>(x^e1) ->\n  ) ") {
            Err(LangError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse_formula("P^<e1>(x^e1) $") {
            Err(LangError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 14)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn declarations_override_convention() {
        let mut ctx = Context::new();
        ctx.declare("a", TermKind::Var);
        let t = parse_term_in("a^e2", &mut ctx).unwrap();
        assert!(t.is_var());
        assert!(!parse_term("a^e2").unwrap().is_var());
    }

    #[test]
    fn formula_file() {
        let text = "# header\nP^<e1>(c)  # trailing\n\n!P(c)\n";
        let fs = parse_formula_file(text).unwrap();
        assert_eq!(fs.len(), 2);
        match parse_formula_file("P^<e1>(c)\nQ(c)\n") {
            Err(LangError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::LangError;

/// A type: `e1` (m-objects), `e2` (classical individuals) or a relation type
/// `<t1,...,tn>` with `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    E1,
    E2,
    Tuple(Vec<TypeExpr>),
}

impl TypeExpr {
    pub fn tuple(components: Vec<TypeExpr>) -> Result<Self, LangError> {
        if components.is_empty() {
            return Err(LangError::EmptyTuple);
        }
        Ok(TypeExpr::Tuple(components))
    }

    /// `<t>`, the type of unary predicates over `t`.
    pub fn predicate_of(t: &TypeExpr) -> Self {
        TypeExpr::Tuple(vec![t.clone()])
    }

    pub fn components(&self) -> Option<&[TypeExpr]> {
        match self {
            TypeExpr::Tuple(c) => Some(c),
            _ => None,
        }
    }

    /// 0 for base types, one more than the deepest component otherwise.
    pub fn depth(&self) -> usize {
        match self {
            TypeExpr::E1 | TypeExpr::E2 => 0,
            TypeExpr::Tuple(c) => 1 + c.iter().map(TypeExpr::depth).max().unwrap_or(0),
        }
    }

    /// Base types at the leaves, left to right.
    pub fn leaves(&self) -> Vec<TypeExpr> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<TypeExpr>) {
        match self {
            TypeExpr::Tuple(c) => c.iter().for_each(|t| t.collect_leaves(out)),
            base => out.push(base.clone()),
        }
    }

    /// This type and all its components, recursively.
    pub fn closure(&self, out: &mut BTreeSet<TypeExpr>) {
        if out.insert(self.clone()) {
            if let TypeExpr::Tuple(c) = self {
                c.iter().for_each(|t| t.closure(out));
            }
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::E1 => f.write_str("e1"),
            TypeExpr::E2 => f.write_str("e2"),
            TypeExpr::Tuple(c) => {
                f.write_str("<")?;
                for (i, t) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(">")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    Var,
    Const,
}

/// A variable or constant together with its type. Two terms are the same
/// symbol iff kind, name and type all agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub kind: TermKind,
    pub name: Arc<str>,
    pub ty: TypeExpr,
}

impl Term {
    pub fn var(name: &str, ty: TypeExpr) -> Self {
        Term {
            kind: TermKind::Var,
            name: Arc::from(name),
            ty,
        }
    }

    pub fn constant(name: &str, ty: TypeExpr) -> Self {
        Term {
            kind: TermKind::Const,
            name: Arc::from(name),
            ty,
        }
    }

    pub fn is_var(&self) -> bool {
        self.kind == TermKind::Var
    }

    pub fn renamed(&self, name: &str) -> Self {
        Term {
            kind: self.kind,
            name: Arc::from(name),
            ty: self.ty.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.name, self.ty)
    }
}

/// `head(args...)`, with the head of type `<t1,...,tn>` and argument `i` of type `ti`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    head: Term,
    args: Vec<Term>,
}

impl Atom {
    pub fn new(head: Term, args: Vec<Term>) -> Result<Self, LangError> {
        let Some(components) = head.ty.components() else {
            return Err(LangError::NotARelation(head.to_string()));
        };
        if components.len() != args.len() {
            return Err(LangError::Arity {
                head: head.to_string(),
                expected: components.len(),
                found: args.len(),
            });
        }
        for (i, (t, a)) in components.iter().zip(&args).enumerate() {
            if *t != a.ty {
                return Err(LangError::TypeMismatch {
                    context: format!("argument {} of {}", i + 1, head),
                    expected: t.clone(),
                    found: a.ty.clone(),
                });
            }
        }
        Ok(Atom { head, args })
    }

    pub fn head(&self) -> &Term {
        &self.head
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub(crate) fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Atom {
        Atom {
            head: f(&self.head),
            args: self.args.iter().map(f).collect(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.head).chain(self.args.iter())
    }
}

/// `left = right` at a type other than `e1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identity {
    left: Term,
    right: Term,
}

impl Identity {
    pub fn new(left: Term, right: Term) -> Result<Self, LangError> {
        if left.ty != right.ty {
            return Err(LangError::TypeMismatch {
                context: format!("identity {left} = {right}"),
                expected: left.ty.clone(),
                found: right.ty.clone(),
            });
        }
        if left.ty == TypeExpr::E1 {
            return Err(LangError::IdentityAtE1);
        }
        Ok(Identity { left, right })
    }

    pub fn left(&self) -> &Term {
        &self.left
    }

    pub fn right(&self) -> &Term {
        &self.right
    }

    pub fn ty(&self) -> &TypeExpr {
        &self.left.ty
    }

    pub(crate) fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Identity {
        Identity {
            left: f(&self.left),
            right: f(&self.right),
        }
    }
}

/// Formulas. `Atom`, `Not`, `Implies` and `Forall` are primitive; the rest is
/// sugar removed by [`desugar`](super::desugar).
///
/// Binders are always variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Term, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Term, Box<Formula>),
    Eq(Identity),
}

impl Formula {
    pub fn atom(head: Term, args: Vec<Term>) -> Result<Self, LangError> {
        Ok(Formula::Atom(Atom::new(head, args)?))
    }

    pub fn eq(left: Term, right: Term) -> Result<Self, LangError> {
        Ok(Formula::Eq(Identity::new(left, right)?))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Term, body: Formula) -> Self {
        debug_assert!(v.is_var(), "binder {v} is not a variable");
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Term, body: Formula) -> Self {
        debug_assert!(v.is_var(), "binder {v} is not a variable");
        Formula::Exists(v, Box::new(body))
    }

    /// True iff only `Atom`, `Not`, `Implies` and `Forall` occur.
    pub fn is_primitive(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(a) | Formula::Forall(_, a) => a.is_primitive(),
            Formula::Implies(a, b) => a.is_primitive() && b.is_primitive(),
            _ => false,
        }
    }

    /// Number of connective, quantifier and atom nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Eq(_) => 1,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Every type mentioned by a term or binder.
    pub fn types(&self) -> BTreeSet<TypeExpr> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            out.insert(t.ty.clone());
        });
        out
    }

    /// Calls `f` on every term occurrence, binders included.
    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom(a) => a.terms().for_each(&mut *f),
            Formula::Eq(e) => {
                f(e.left());
                f(e.right());
            }
            Formula::Not(a) => a.visit_terms(f),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                f(v);
                a.visit_terms(f);
            }
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    /// All constants occurring in the formula.
    pub fn constants(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if !t.is_var() {
                out.insert(t.clone());
            }
        });
        out
    }

    /// All names used by any term, free or bound.
    pub fn names(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            out.insert(t.name.clone());
        });
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_formula(self))
    }
}

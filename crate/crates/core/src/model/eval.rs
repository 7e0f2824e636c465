use std::collections::BTreeMap;
use std::sync::Arc;

use crate::lang::{Formula, Term};

use super::frame::Frame;
use super::value::Value;
use super::ModelError;

/// A frame together with a denotation for constants.
#[derive(Debug, Clone)]
pub struct Interpretation {
    frame: Arc<Frame>,
    denotation: BTreeMap<Term, usize>,
}

impl Interpretation {
    pub fn new(frame: Arc<Frame>) -> Self {
        Interpretation {
            frame,
            denotation: BTreeMap::new(),
        }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    /// Sets the denotation of constant `c`.
    pub fn assign(&mut self, c: &Term, v: &Value) -> Result<(), ModelError> {
        if c.is_var() {
            return Err(ModelError::NotAConstant(c.to_string()));
        }
        let e = self.frame.resolve(&c.ty, v)?;
        self.denotation.insert(c.clone(), e);
        Ok(())
    }

    pub(crate) fn assign_index(&mut self, c: &Term, e: usize) {
        self.denotation.insert(c.clone(), e);
    }

    pub(crate) fn index_of(&self, c: &Term) -> Option<usize> {
        self.denotation.get(c).copied()
    }

    pub fn denotation(&self, c: &Term) -> Option<Value> {
        let e = self.denotation.get(c)?;
        self.frame.value(&c.ty, *e).ok()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Term> {
        self.denotation.keys()
    }

    /// True when the frame is standard.
    pub fn is_principal(&self) -> bool {
        self.frame.kind() == super::FrameKind::Standard
    }
}

/// Values for variables and, optionally, constants. A constant's value must
/// be indistinguishable from its denotation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    pub(crate) map: BTreeMap<Term, usize>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn set(&mut self, frame: &Frame, t: &Term, v: &Value) -> Result<(), ModelError> {
        let e = frame.resolve(&t.ty, v)?;
        self.map.insert(t.clone(), e);
        Ok(())
    }

    pub fn get(&self, frame: &Frame, t: &Term) -> Option<Value> {
        frame.value(&t.ty, *self.map.get(t)?).ok()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.map.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone)]
enum Node {
    Atom { head: usize, args: Vec<usize>, dom: usize },
    Eq { left: usize, right: usize, dom: usize },
    Not(Box<Node>),
    Implies(Box<Node>, Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall { slot: usize, size: usize, body: Box<Node> },
    Exists { slot: usize, size: usize, body: Box<Node> },
}

/// A formula compiled against a frame. Free terms occupy the first slots.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    root: Node,
    pub free: Vec<Term>,
    pub free_doms: Vec<usize>,
    slots: usize,
}

pub(crate) fn compile(frame: &Frame, f: &Formula) -> Result<Compiled, ModelError> {
    let mut c = Compiler {
        frame,
        free: Vec::new(),
        free_doms: Vec::new(),
        scopes: Vec::new(),
        slots: 0,
    };
    let mut free_terms: Vec<Term> = crate::lang::free_terms(f).into_iter().collect();
    free_terms.sort();
    for t in free_terms {
        let dom = frame.domain_id(&t.ty)?;
        c.free.push(t);
        c.free_doms.push(dom);
    }
    c.slots = c.free.len();
    let root = c.node(f)?;
    Ok(Compiled {
        root,
        free: c.free,
        free_doms: c.free_doms,
        slots: c.slots,
    })
}

struct Compiler<'a> {
    frame: &'a Frame,
    free: Vec<Term>,
    free_doms: Vec<usize>,
    scopes: Vec<(Term, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn slot(&self, t: &Term) -> usize {
        self.scopes
            .iter()
            .rev()
            .find(|(b, _)| b == t)
            .map(|(_, s)| *s)
            .unwrap_or_else(|| self.free.iter().position(|f| f == t).expect("free term"))
    }

    fn node(&mut self, f: &Formula) -> Result<Node, ModelError> {
        let bin = |c: &mut Self, a: &Formula, b: &Formula| -> Result<(Box<Node>, Box<Node>), ModelError> {
            Ok((Box::new(c.node(a)?), Box::new(c.node(b)?)))
        };
        Ok(match f {
            Formula::Atom(a) => Node::Atom {
                head: self.slot(a.head()),
                args: a.args().iter().map(|t| self.slot(t)).collect(),
                dom: self.frame.domain_id(&a.head().ty)?,
            },
            Formula::Eq(e) => Node::Eq {
                left: self.slot(e.left()),
                right: self.slot(e.right()),
                dom: self.frame.domain_id(e.ty())?,
            },
            Formula::Not(a) => Node::Not(Box::new(self.node(a)?)),
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::Implies(a, b)
            }
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::Or(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::Iff(a, b)
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let slot = self.slots;
                self.slots += 1;
                let size = self.frame.domain_size(&v.ty)?;
                self.scopes.push((v.clone(), slot));
                let body = Box::new(self.node(body)?);
                self.scopes.pop();
                match f {
                    Formula::Forall(..) => Node::Forall { slot, size, body },
                    _ => Node::Exists { slot, size, body },
                }
            }
        })
    }
}

impl Compiled {
    pub fn env(&self) -> Vec<usize> {
        vec![0; self.slots]
    }

    pub fn eval(&self, frame: &Frame, env: &mut [usize]) -> bool {
        eval(&self.root, frame, env)
    }
}

fn eval(n: &Node, frame: &Frame, env: &mut [usize]) -> bool {
    match n {
        Node::Atom { head, args, dom } => {
            let d = &frame.domains[*dom];
            let idx = d.tuple_index(args.iter().map(|&a| env[a]));
            d.rels[env[*head]].contains(idx)
        }
        Node::Eq { left, right, dom } => {
            let class = &frame.domains[*dom].class;
            class[env[*left]] == class[env[*right]]
        }
        Node::Not(a) => !eval(a, frame, env),
        Node::Implies(a, b) => !eval(a, frame, env) || eval(b, frame, env),
        Node::And(a, b) => eval(a, frame, env) && eval(b, frame, env),
        Node::Or(a, b) => eval(a, frame, env) || eval(b, frame, env),
        Node::Iff(a, b) => eval(a, frame, env) == eval(b, frame, env),
        Node::Forall { slot, size, body } => (0..*size).all(|e| {
            env[*slot] = e;
            eval(body, frame, env)
        }),
        Node::Exists { slot, size, body } => (0..*size).any(|e| {
            env[*slot] = e;
            eval(body, frame, env)
        }),
    }
}

/// Whether `v` (falling back to the denotation for constants) satisfies `f`.
/// Identity subformulas are read as the pseudo-diagonal; desugar first to
/// evaluate the defined identity instead.
pub fn satisfies(i: &Interpretation, v: &Valuation, f: &Formula) -> Result<bool, ModelError> {
    let frame = &*i.frame;
    let c = compile(frame, f)?;
    let mut env = c.env();
    for (k, t) in c.free.iter().enumerate() {
        env[k] = match (v.map.get(t), t.is_var()) {
            (Some(&e), _) => e,
            (None, false) => i.index_of(t).ok_or_else(|| ModelError::Unassigned(t.to_string()))?,
            (None, true) => return Err(ModelError::Unassigned(t.to_string())),
        };
        if env[k] >= frame.domains[c.free_doms[k]].size {
            return Err(ModelError::BadValue(format!("value of {t} out of range")));
        }
    }
    Ok(c.eval(frame, &mut env))
}

/// Candidate values per free slot: the whole domain for variables, the
/// indistinguishability class of the denotation for constants.
pub(crate) fn valuation_space(i: &Interpretation, c: &Compiled) -> Result<Vec<Vec<usize>>, ModelError> {
    let frame = &*i.frame;
    c.free
        .iter()
        .zip(&c.free_doms)
        .map(|(t, &dom)| {
            let d = &frame.domains[dom];
            if t.is_var() {
                Ok((0..d.size).collect())
            } else {
                let e = i.index_of(t).ok_or_else(|| ModelError::Unassigned(t.to_string()))?;
                Ok((0..d.size).filter(|&x| d.class[x] == d.class[e]).collect())
            }
        })
        .collect()
}

/// Runs `visit` on each environment of the valuation space, stopping when it
/// returns true. Returns the stopping environment.
pub(crate) fn search_space(
    c: &Compiled,
    space: &[Vec<usize>],
    mut visit: impl FnMut(&mut [usize]) -> bool,
) -> Option<Vec<usize>> {
    if space.iter().any(Vec::is_empty) {
        return None;
    }
    let mut env = c.env();
    let mut pos = vec![0usize; space.len()];
    loop {
        for (k, p) in pos.iter().enumerate() {
            env[k] = space[k][*p];
        }
        if visit(&mut env) {
            return Some(env[..space.len()].to_vec());
        }
        let mut k = 0;
        loop {
            if k == pos.len() {
                return None;
            }
            pos[k] += 1;
            if pos[k] < space[k].len() {
                break;
            }
            pos[k] = 0;
            k += 1;
        }
    }
}

/// Splits a stopping environment into denotations for the constants and a
/// valuation of the variables.
pub(crate) fn witness_from(i: &Interpretation, c: &Compiled, values: &[usize]) -> (Interpretation, Valuation) {
    let mut interp = i.clone();
    let mut v = Valuation::new();
    for (t, &e) in c.free.iter().zip(values) {
        if t.is_var() {
            v.map.insert(t.clone(), e);
        } else {
            interp.assign_index(t, e);
        }
    }
    (interp, v)
}

pub(crate) fn valuation_from(c: &Compiled, values: &[usize]) -> Valuation {
    Valuation {
        map: c.free.iter().cloned().zip(values.iter().copied()).collect(),
    }
}

/// A valuation under which `f` fails, if any.
pub fn refuting_valuation(i: &Interpretation, f: &Formula) -> Result<Option<Valuation>, ModelError> {
    let frame = &*i.frame;
    let c = compile(frame, f)?;
    let space = valuation_space(i, &c)?;
    Ok(search_space(&c, &space, |env| !c.eval(frame, env)).map(|vals| valuation_from(&c, &vals)))
}

/// A valuation under which `f` holds, if any.
pub fn satisfying_valuation(i: &Interpretation, f: &Formula) -> Result<Option<Valuation>, ModelError> {
    let frame = &*i.frame;
    let c = compile(frame, f)?;
    let space = valuation_space(i, &c)?;
    Ok(search_space(&c, &space, |env| c.eval(frame, env)).map(|vals| valuation_from(&c, &vals)))
}

/// True under every valuation. Constants range over the elements
/// indistinguishable from their denotations.
pub fn is_true(i: &Interpretation, f: &Formula) -> Result<bool, ModelError> {
    Ok(refuting_valuation(i, f)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{desugar, parse_formula, parse_type, universal_closure};
    use crate::model::{build_frame, FrameKind, FrameSpec};

    fn interp(n: usize, kind: FrameKind, f: &Formula) -> Interpretation {
        let frame = build_frame(&FrameSpec::new(n, 1, kind).with_types(&f.types())).unwrap();
        Interpretation::new(Arc::new(frame))
    }

    #[test]
    fn quantifiers_over_atoms() {
        let ex = parse_formula("exists x^e1 . P^<e1>(x)").unwrap();
        let all = parse_formula("forall x^e1 . P^<e1>(x)").unwrap();
        let p = Term::constant("P", parse_type("<e1>").unwrap());
        let mut i = interp(2, FrameKind::Standard, &ex);
        i.assign(&p, &"{#1}".parse().unwrap()).unwrap();
        let v = Valuation::new();
        assert!(satisfies(&i, &v, &ex).unwrap());
        assert!(!satisfies(&i, &v, &all).unwrap());
        assert_eq!(satisfies(&i, &v, &Formula::not(ex.clone())).unwrap(), !satisfies(&i, &v, &ex).unwrap());
    }

    #[test]
    fn free_variables_and_closure() {
        let f = parse_formula("P^<e1>(x^e1)").unwrap();
        let p = Term::constant("P", parse_type("<e1>").unwrap());
        let mut i = interp(2, FrameKind::Standard, &f);
        i.assign(&p, &"{}".parse().unwrap()).unwrap();
        assert!(!is_true(&i, &f).unwrap());
        assert!(satisfies(&i, &Valuation::new(), &f).is_err());
        i.assign(&p, &"{#1, #2}".parse().unwrap()).unwrap();
        assert!(is_true(&i, &f).unwrap());
        assert_eq!(is_true(&i, &f).unwrap(), is_true(&i, &universal_closure(&f)).unwrap());
    }

    #[test]
    fn constants_vary_within_their_class() {
        // With c^e1 denoting #1, P(c) is true only if P holds of every atom.
        let f = parse_formula("P^<e1>(c^e1)").unwrap();
        let p = Term::constant("P", parse_type("<e1>").unwrap());
        let c = Term::constant("c", crate::lang::TypeExpr::E1);
        let mut i = interp(2, FrameKind::Standard, &f);
        i.assign(&p, &"{#1}".parse().unwrap()).unwrap();
        i.assign(&c, &"#1".parse().unwrap()).unwrap();
        assert!(satisfies(&i, &Valuation::new(), &f).unwrap());
        assert!(!is_true(&i, &f).unwrap());
    }

    #[test]
    fn defined_identity_versus_pseudo_diagonal() {
        let eq = parse_formula("X^<e1> = Y^<e1>").unwrap();
        let lb = desugar(&eq);
        let std = interp(2, FrameKind::Standard, &lb);
        let t = parse_type("<e1>").unwrap();
        let f = std.frame().clone();
        let x = Term::var("X", t.clone());
        let y = Term::var("Y", t.clone());
        let mut v = Valuation::new();
        v.set(&f, &x, &"{#1}".parse().unwrap()).unwrap();
        v.set(&f, &y, &"{#2}".parse().unwrap()).unwrap();
        assert!(satisfies(&std, &v, &eq).unwrap());
        assert!(!satisfies(&std, &v, &lb).unwrap());
    }
}

//! The compiled evaluator against a direct recursive reading of formulas
//! over written domain elements.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lop_core::gen::{random_closed_formula, random_interpretation, Signature};
use lop_core::lang::{desugar, Formula, Term, TypeExpr};
use lop_core::model::{build_frame, satisfies, DomainSpec, Frame, FrameKind, FrameSpec, Interpretation, Valuation, Value};

struct Naive<'a> {
    domains: BTreeMap<TypeExpr, Vec<Value>>,
    interp: &'a Interpretation,
}

impl<'a> Naive<'a> {
    fn new(frame: &Frame, interp: &'a Interpretation) -> Self {
        let domains = frame
            .types()
            .map(|t| {
                let n = frame.domain_size(t).unwrap();
                (t.clone(), (0..n).map(|e| frame.value(t, e).unwrap()).collect())
            })
            .collect();
        Naive { domains, interp }
    }

    fn lookup(&self, t: &Term, env: &BTreeMap<Term, Value>) -> Value {
        env.get(t).cloned().unwrap_or_else(|| self.interp.denotation(t).expect("denoted"))
    }

    fn eval(&self, f: &Formula, env: &mut BTreeMap<Term, Value>) -> bool {
        match f {
            Formula::Atom(a) => {
                let Value::Set(items) = self.lookup(a.head(), env) else { panic!("relation expected") };
                let args: Vec<Value> = a.args().iter().map(|t| self.lookup(t, env)).collect();
                let probe = if args.len() == 1 { args[0].clone() } else { Value::Tuple(args) };
                items.contains(&probe)
            }
            Formula::Not(a) => !self.eval(a, env),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Formula::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Formula::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let universal = matches!(f, Formula::Forall(..));
                let saved = env.remove(v);
                let mut result = universal;
                for x in &self.domains[&v.ty] {
                    env.insert(v.clone(), x.clone());
                    if self.eval(body, env) != universal {
                        result = !universal;
                        break;
                    }
                }
                env.remove(v);
                if let Some(s) = saved {
                    env.insert(v.clone(), s);
                }
                result
            }
            Formula::Eq(_) => unreachable!("desugared"),
        }
    }
}

fn frame_for(rng: &mut ChaCha8Rng, types: &BTreeSet<TypeExpr>) -> Arc<Frame> {
    let n = rng.gen_range(0..=2);
    let m = rng.gen_range(1..=2);
    let kind = if rng.gen_bool(0.5) { FrameKind::Custom } else { FrameKind::Symmetric };
    let mut spec = FrameSpec::new(n, m, kind).with_types(types);
    if kind == FrameKind::Custom {
        for t in types.iter().filter(|t| t.depth() == 1) {
            spec = spec.with_domain(t.clone(), DomainSpec::Full);
        }
    }
    Arc::new(build_frame(&spec).unwrap())
}

#[test]
fn compiled_evaluator_matches_naive_reading() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sig = Signature::small();
    let mut agree = [0usize; 2];
    for _ in 0..1000 {
        let f = desugar(&random_closed_formula(&mut rng, &sig, 5));
        let frame = frame_for(&mut rng, &f.types());
        let interp = random_interpretation(&mut rng, &frame, f.constants()).unwrap();
        if f.constants().iter().any(|c| interp.denotation(c).is_none()) {
            continue;
        }
        let fast = satisfies(&interp, &Valuation::new(), &f).unwrap();
        let slow = Naive::new(&frame, &interp).eval(&f, &mut BTreeMap::new());
        assert_eq!(fast, slow, "{f}");
        agree[fast as usize] += 1;
    }
    assert!(agree[0] > 100 && agree[1] > 100, "{agree:?}");
}

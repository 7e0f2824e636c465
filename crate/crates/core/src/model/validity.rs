use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::lang::{desugar, Formula, Term, TypeExpr};

use super::eval::{compile, search_space, valuation_space, witness_from, Compiled, Interpretation, Valuation};
use super::frame::{build_frame, Frame, FrameKind, FrameSpec, DEFAULT_DOMAIN_BUDGET};
use super::ModelError;

/// Frames with `0..=n_m` atoms of one species and `1..=classical` classical
/// elements, of the given kind, with types of depth at most `depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub n_m: usize,
    pub classical: usize,
    pub depth: usize,
    pub kind: FrameKind,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            n_m: 3,
            classical: 2,
            depth: 2,
            kind: FrameKind::Symmetric,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub domain_budget: usize,
    /// Frames needing more denotations than this are skipped.
    pub max_denotations: u64,
    /// Only interpretations making every premise true are considered.
    pub premises: Vec<Formula>,
    /// Evaluate identity through its definition rather than the pseudo-diagonal.
    pub desugar: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            domain_budget: DEFAULT_DOMAIN_BUDGET,
            max_denotations: 1 << 22,
            premises: Vec::new(),
            desugar: true,
        }
    }
}

/// An interpretation and valuation where the formula fails (or, for
/// satisfiability, holds).
#[derive(Debug, Clone)]
pub struct Witness {
    pub interpretation: Interpretation,
    pub valuation: Valuation,
}

impl Witness {
    pub fn frame(&self) -> &Arc<Frame> {
        self.interpretation.frame()
    }
}

#[derive(Debug, Clone)]
pub struct SkippedFrame {
    pub n_m: usize,
    pub classical: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub bounds: Bounds,
    pub witness: Option<Witness>,
    pub frames_checked: usize,
    /// Interpretations examined, counting up to and including the witness.
    pub interpretations: u64,
    pub skipped: Vec<SkippedFrame>,
}

impl SearchReport {
    /// True if some frame within bounds was not examined.
    pub fn incomplete(&self) -> bool {
        !self.skipped.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Refute,
    Satisfy,
}

/// Searches every frame and denotation within bounds for an interpretation
/// where `f` is not true. `witness` is `None` when there is no counterexample.
pub fn bounded_validity(f: &Formula, bounds: &Bounds, opts: &SearchOptions) -> Result<SearchReport, ModelError> {
    search(f, bounds, opts, Goal::Refute)
}

/// Searches for an interpretation and valuation satisfying `f`.
pub fn bounded_satisfiability(
    f: &Formula,
    bounds: &Bounds,
    opts: &SearchOptions,
) -> Result<SearchReport, ModelError> {
    search(f, bounds, opts, Goal::Satisfy)
}

fn search(f: &Formula, bounds: &Bounds, opts: &SearchOptions, goal: Goal) -> Result<SearchReport, ModelError> {
    let prep = |g: &Formula| if opts.desugar { desugar(g) } else { g.clone() };
    let target = prep(f);
    let premises: Vec<Formula> = opts.premises.iter().map(prep).collect();
    let mut types = BTreeSet::new();
    for g in std::iter::once(&target).chain(&premises) {
        for t in g.types() {
            if t.depth() > bounds.depth {
                return Err(ModelError::DepthExceeded { ty: t, bound: bounds.depth });
            }
            t.closure(&mut types);
        }
    }
    let mut constants: BTreeSet<Term> = target.constants();
    for p in &premises {
        constants.extend(p.constants());
    }
    let constants: Vec<Term> = constants.into_iter().collect();

    let mut report = SearchReport {
        bounds: *bounds,
        witness: None,
        frames_checked: 0,
        interpretations: 0,
        skipped: Vec::new(),
    };
    for n_m in 0..=bounds.n_m {
        for classical in 1..=bounds.classical {
            let skip = |reason: String| SkippedFrame { n_m, classical, reason };
            let spec = FrameSpec::new(n_m, classical, bounds.kind)
                .with_types(&types)
                .with_budget(opts.domain_budget);
            let frame = match build_frame(&spec) {
                Ok(fr) => Arc::new(fr),
                Err(e @ ModelError::BudgetExceeded { .. }) => {
                    report.skipped.push(skip(e.to_string()));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let sizes: Vec<u64> = constants
                .iter()
                .map(|c| frame.domain_size(&c.ty).map(|s| s as u64))
                .collect::<Result<_, _>>()?;
            let total = sizes.iter().try_fold(1u64, |acc, &s| acc.checked_mul(s));
            let total = match total {
                Some(t) if t <= opts.max_denotations => t,
                _ => {
                    report.skipped.push(skip(format!(
                        "more than {} denotations",
                        opts.max_denotations
                    )));
                    continue;
                }
            };
            report.frames_checked += 1;
            let target_c = compile(&frame, &target)?;
            let premise_c: Vec<Compiled> = premises.iter().map(|p| compile(&frame, p)).collect::<Result<_, _>>()?;
            let found = (0..total).into_par_iter().find_map_first(|idx| {
                let interp = decode_denotation(&frame, &constants, &sizes, idx);
                examine(&frame, &interp, &target_c, &premise_c, goal).map(|hit| {
                    let (interp, v) = witness_from(&interp, &target_c, &hit);
                    (idx, interp, v)
                })
            });
            match found {
                Some((idx, interpretation, valuation)) => {
                    report.interpretations += idx + 1;
                    report.witness = Some(Witness {
                        interpretation,
                        valuation,
                    });
                    return Ok(report);
                }
                None => report.interpretations += total,
            }
        }
    }
    Ok(report)
}

fn decode_denotation(frame: &Arc<Frame>, constants: &[Term], sizes: &[u64], mut idx: u64) -> Interpretation {
    let mut interp = Interpretation::new(frame.clone());
    for (c, &s) in constants.iter().zip(sizes) {
        interp.assign_index(c, (idx % s) as usize);
        idx /= s;
    }
    interp
}

/// The environment of free terms where the target meets the goal, if the
/// premises hold.
fn examine(frame: &Frame, interp: &Interpretation, target: &Compiled, premises: &[Compiled], goal: Goal) -> Option<Vec<usize>> {
    for p in premises {
        let space = valuation_space(interp, p).ok()?;
        if search_space(p, &space, |env| !p.eval(frame, env)).is_some() {
            return None;
        }
    }
    let space = valuation_space(interp, target).ok()?;
    search_space(target, &space, |env| match goal {
        Goal::Refute => !target.eval(frame, env),
        Goal::Satisfy => target.eval(frame, env),
    })
}

/// All tuple types over `e1` and `e2` of depth at most `depth` whose tuples
/// have at most `arity` components.
pub fn types_up_to(depth: usize, arity: usize) -> Vec<TypeExpr> {
    let mut levels: Vec<Vec<TypeExpr>> = vec![vec![TypeExpr::E1, TypeExpr::E2]];
    for _ in 0..depth {
        let pool: Vec<TypeExpr> = levels.iter().flatten().cloned().collect();
        let mut next = Vec::new();
        for n in 1..=arity {
            let mut idx = vec![0usize; n];
            loop {
                let comps: Vec<TypeExpr> = idx.iter().map(|&i| pool[i].clone()).collect();
                let t = TypeExpr::Tuple(comps);
                if !levels.iter().flatten().any(|u| *u == t) && !next.contains(&t) {
                    next.push(t);
                }
                let mut k = 0;
                while k < n {
                    idx[k] += 1;
                    if idx[k] < pool.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
        levels.push(next);
    }
    levels.into_iter().skip(1).flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_formula;

    fn small(kind: FrameKind) -> Bounds {
        Bounds {
            n_m: 2,
            classical: 1,
            depth: 1,
            kind,
        }
    }

    #[test]
    fn tautology_has_no_counterexample() {
        let f = parse_formula("P^<e1>(c^e1) -> P(c)").unwrap();
        let r = bounded_validity(&f, &Bounds::default(), &SearchOptions::default()).unwrap();
        assert!(r.witness.is_none());
        assert!(!r.incomplete());
        assert_eq!(r.frames_checked, 8);
    }

    #[test]
    fn universal_predicate_refuted_at_smallest_frame() {
        let f = parse_formula("forall x^e1 . P^<e1>(x)").unwrap();
        for kind in [FrameKind::Standard, FrameKind::Symmetric] {
            let r = bounded_validity(&f, &small(kind), &SearchOptions::default()).unwrap();
            let w = r.witness.expect("counterexample");
            assert_eq!(w.frame().n_atoms(), 1);
            let p = Term::constant("P", TypeExpr::predicate_of(&TypeExpr::E1));
            assert_eq!(w.interpretation.denotation(&p).unwrap().to_string(), "{}");
        }
    }

    #[test]
    fn satisfiability_and_premises() {
        let f = parse_formula("exists x^e1 . P^<e1>(x) & !Q^<e1>(x)").unwrap();
        let r = bounded_satisfiability(&f, &small(FrameKind::Standard), &SearchOptions::default()).unwrap();
        assert!(r.witness.is_some());
        let g = parse_formula("Q^<e1>(c^e1)").unwrap();
        let opts = SearchOptions {
            premises: vec![parse_formula("forall x^e1 . Q^<e1>(x)").unwrap()],
            ..SearchOptions::default()
        };
        assert!(bounded_validity(&g, &small(FrameKind::Standard), &opts).unwrap().witness.is_none());
    }

    #[test]
    fn witnesses_reload_and_still_refute() {
        use crate::model::{satisfies, FrameDesc};
        for src in [
            "forall x^e1 . P^<e1>(x)",
            "P^<e1>(c^e1) -> Q^<e1>(c)",
            "X^<e1>(x^e1) -> P^<e1>(x)",
            "a^e2 = b^e2",
        ] {
            let f = parse_formula(src).unwrap();
            for kind in [FrameKind::Standard, FrameKind::Symmetric] {
                let bounds = Bounds {
                    classical: 2,
                    ..small(kind)
                };
                let r = bounded_validity(&f, &bounds, &SearchOptions::default()).unwrap();
                let w = r.witness.expect(src);
                assert!(w.valuation.terms().all(Term::is_var));
                assert!(!satisfies(&w.interpretation, &w.valuation, &desugar(&f)).unwrap());
                let desc = FrameDesc::describe(&w.interpretation, &w.valuation).unwrap();
                let l = FrameDesc::from_json(&desc.to_json()).unwrap().load().unwrap();
                assert!(!satisfies(&l.interpretation, &l.valuation, &desugar(&f)).unwrap(), "{src}");
            }
        }
    }

    #[test]
    fn depth_guard() {
        let f = parse_formula("F^<<e1>>(P^<e1>)").unwrap();
        assert!(matches!(
            bounded_validity(&f, &small(FrameKind::Standard), &SearchOptions::default()),
            Err(ModelError::DepthExceeded { .. })
        ));
    }

    #[test]
    fn type_enumeration() {
        let ts = types_up_to(1, 2);
        assert_eq!(ts.len(), 2 + 4);
        assert_eq!(types_up_to(2, 1).len(), 2 + 2);
    }
}

//! Propositional skeletons and the truth-table check behind axiom A1.

use std::collections::HashMap;

use crate::lang::{alpha_canonical, desugar, Formula};

use super::ProofError;

/// Largest number of propositional atoms the truth table will enumerate.
pub const MAX_SKELETON_ATOMS: usize = 24;

/// A formula over `!` and `->` with numbered propositional atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Skeleton {
    Atom(usize),
    Not(Box<Skeleton>),
    Implies(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Skeleton) -> Self {
        Skeleton::Not(Box::new(a))
    }

    pub fn implies(a: Skeleton, b: Skeleton) -> Self {
        Skeleton::Implies(Box::new(a), Box::new(b))
    }

    /// One more than the largest atom index.
    pub fn atom_count(&self) -> usize {
        match self {
            Skeleton::Atom(i) => i + 1,
            Skeleton::Not(a) => a.atom_count(),
            Skeleton::Implies(a, b) => a.atom_count().max(b.atom_count()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Skeleton::Atom(_) => 0,
            Skeleton::Not(a) => 1 + a.depth(),
            Skeleton::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Evaluates 64 rows at once; bit `r` of `atoms[i]` is atom `i` in row `r`.
    fn eval_block(&self, atoms: &[u64]) -> u64 {
        match self {
            Skeleton::Atom(i) => atoms[*i],
            Skeleton::Not(a) => !a.eval_block(atoms),
            Skeleton::Implies(a, b) => !a.eval_block(atoms) | b.eval_block(atoms),
        }
    }
}

/// The skeleton of a primitive formula together with the subformulas its
/// atoms stand for. Maximal subformulas not headed by `!` or `->` become
/// atoms; alpha-equivalent subformulas share an atom.
pub fn skeleton(f: &Formula) -> (Skeleton, Vec<Formula>) {
    let mut table: HashMap<Formula, usize> = HashMap::new();
    let mut atoms = Vec::new();
    let s = abstract_rec(&desugar(f), &mut table, &mut atoms);
    (s, atoms)
}

fn abstract_rec(f: &Formula, table: &mut HashMap<Formula, usize>, atoms: &mut Vec<Formula>) -> Skeleton {
    match f {
        Formula::Not(a) => Skeleton::not(abstract_rec(a, table, atoms)),
        Formula::Implies(a, b) => Skeleton::implies(abstract_rec(a, table, atoms), abstract_rec(b, table, atoms)),
        other => {
            let key = alpha_canonical(other);
            let next = atoms.len();
            let id = *table.entry(key).or_insert_with(|| {
                atoms.push(other.clone());
                next
            });
            Skeleton::Atom(id)
        }
    }
}

/// True iff the skeleton is true in all `2^n` rows, `n = atom_count()`.
pub fn skeleton_is_tautology(s: &Skeleton) -> Result<bool, ProofError> {
    let n = s.atom_count();
    if n > MAX_SKELETON_ATOMS {
        return Err(ProofError::TooManyAtoms {
            atoms: n,
            limit: MAX_SKELETON_ATOMS,
        });
    }
    // Atoms 0..6 vary inside a 64-row block; the rest are fixed per block.
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let rows_mask = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    let blocks = if n > 6 { 1u64 << (n - 6) } else { 1 };
    let mut atoms = vec![0u64; n];
    for block in 0..blocks {
        for (i, slot) in atoms.iter_mut().enumerate() {
            *slot = if i < 6 {
                LOW[i]
            } else if block >> (i - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
        }
        if s.eval_block(&atoms) & rows_mask != rows_mask {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Axiom A1: `f` is a substitution instance of a tautology in `!` and `->`.
pub fn is_tautology_instance(f: &Formula) -> Result<bool, ProofError> {
    let (s, _) = skeleton(f);
    skeleton_is_tautology(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_formula;

    fn taut(s: &str) -> bool {
        is_tautology_instance(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert!(taut("P^<e1>(x^e1) -> P(x)"));
        assert!(!taut("(A^<e2>(a^e2) -> B^<e2>(a)) -> A(a)"));
        assert!(taut("(!B^<e2>(a^e2) -> !A^<e2>(a)) -> A(a) -> B(a)"));
    }

    #[test]
    fn alpha_variants_share_an_atom() {
        assert!(taut("(forall x^e1 . P^<e1>(x)) -> (forall y^e1 . P(y))"));
        assert!(!taut("(forall x^e1 . P^<e1>(x)) -> (forall y^e1 . Q^<e1>(y))"));
    }

    #[test]
    fn sugar_is_expanded_first() {
        assert!(taut("A^<e2>(a^e2) | !A(a)"));
        assert!(taut("c^e2 = d^e2 <-> c = d"));
        assert!(!taut("A^<e2>(a^e2) & !A(a)"));
    }

    #[test]
    fn wide_skeletons() {
        // p0 -> (p1 -> ... -> (p9 -> p0))
        let mut s = Skeleton::Atom(0);
        for i in (1..10).rev() {
            s = Skeleton::implies(Skeleton::Atom(i), s);
        }
        let s = Skeleton::implies(Skeleton::Atom(0), s);
        assert!(skeleton_is_tautology(&s).unwrap());
        let bad = Skeleton::implies(Skeleton::Atom(9), Skeleton::Atom(8));
        assert!(!skeleton_is_tautology(&bad).unwrap());
        let huge = Skeleton::implies(Skeleton::Atom(30), Skeleton::Atom(30));
        assert!(matches!(skeleton_is_tautology(&huge), Err(ProofError::TooManyAtoms { .. })));
    }
}

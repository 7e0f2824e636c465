//! Finite kernel of quasi-set theory.
//!
//! A [`QSet`] is stored intensionally: its pure part is a map from m-atom
//! [`Species`] to a multiplicity, and its classical part is a finite set of
//! M-atoms and classical sets (quasi-sets whose transitive closure holds no
//! m-atom). Individual m-atoms never appear in this representation, so no
//! public operation can tell two atoms of one species apart.
//!
//! Labeled atoms exist only inside [`LabeledConcretization`], which backs the
//! finite checks and the model module; every observable it produces is a
//! quotient back to a `QSet`.

mod concrete;
mod text;

pub use concrete::{Label, LabeledConcretization};
pub use text::parse_qset;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Default bound on the quasi-cardinal accepted by [`power_profile`].
pub const DEFAULT_POWER_BOUND: u64 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSetError {
    #[error("species `{0}` does not occur in the quasi-set")]
    AbsentSpecies(Species),
    #[error("quasi-cardinal {qc} exceeds the enumeration bound {bound}")]
    SizeBound { qc: u64, bound: u64 },
    #[error("cannot exchange atoms of different species (`{0}` and `{1}`)")]
    SpeciesMismatch(Species, Species),
    #[error("unknown atom label {0}")]
    UnknownLabel(usize),
    #[error("classical members must not contain m-atoms")]
    PureInClassical,
    #[error("duplicate classical member {0}")]
    DuplicateClassical(String),
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
}

/// An indistinguishability class of m-atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Species(Arc<str>);

impl Species {
    pub fn new(name: &str) -> Self {
        Species(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Species {
    fn from(s: &str) -> Self {
        Species::new(s)
    }
}

/// A member of the classical part: an M-atom (compared by tag) or a classical set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassicalElem {
    MAtom(String),
    Set(QSet),
}

impl ClassicalElem {
    /// Builds a classical-set member, rejecting anything with m-atoms in its
    /// transitive closure.
    pub fn set(q: QSet) -> Result<Self, QSetError> {
        if q.is_classical() {
            Ok(ClassicalElem::Set(q))
        } else {
            Err(QSetError::PureInClassical)
        }
    }

    fn extensionally_equal(&self, other: &ClassicalElem) -> bool {
        match (self, other) {
            (ClassicalElem::MAtom(a), ClassicalElem::MAtom(b)) => a == b,
            (ClassicalElem::Set(a), ClassicalElem::Set(b)) => indist(a, b),
            _ => false,
        }
    }
}

/// A finite quasi-set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QSet {
    pure: BTreeMap<Species, u64>,
    classical: BTreeSet<ClassicalElem>,
}

impl QSet {
    pub fn empty() -> Self {
        QSet::default()
    }

    /// A pure quasi-set with `count` m-atoms of one species.
    pub fn pure(species: impl Into<Species>, count: u64) -> Self {
        let mut q = QSet::default();
        q.add_atoms(species.into(), count);
        q
    }

    pub fn from_parts(
        pure: impl IntoIterator<Item = (Species, u64)>,
        classical: impl IntoIterator<Item = ClassicalElem>,
    ) -> Result<Self, QSetError> {
        let mut q = QSet::default();
        for (s, n) in pure {
            q.add_atoms(s, n);
        }
        for c in classical {
            q.insert_classical(c)?;
        }
        Ok(q)
    }

    pub fn with_classical(mut self, elem: ClassicalElem) -> Result<Self, QSetError> {
        self.insert_classical(elem)?;
        Ok(self)
    }

    pub(crate) fn add_atoms(&mut self, s: Species, count: u64) {
        if count > 0 {
            *self.pure.entry(s).or_insert(0) += count;
        }
    }

    fn insert_classical(&mut self, elem: ClassicalElem) -> Result<(), QSetError> {
        if let ClassicalElem::Set(inner) = &elem {
            if !inner.is_classical() {
                return Err(QSetError::PureInClassical);
            }
        }
        if self.classical.iter().any(|c| c.extensionally_equal(&elem)) {
            return Err(QSetError::DuplicateClassical(text::print_elem(&elem)));
        }
        self.classical.insert(elem);
        Ok(())
    }

    pub fn multiplicity(&self, s: &Species) -> u64 {
        self.pure.get(s).copied().unwrap_or(0)
    }

    pub fn species(&self) -> impl Iterator<Item = (&Species, u64)> {
        self.pure.iter().map(|(s, n)| (s, *n))
    }

    pub fn classical(&self) -> impl Iterator<Item = &ClassicalElem> {
        self.classical.iter()
    }

    pub fn classical_len(&self) -> usize {
        self.classical.len()
    }

    /// True iff every element is an m-atom.
    pub fn is_pure(&self) -> bool {
        self.classical.is_empty()
    }

    /// The `Z(x)` predicate: no m-atom in the transitive closure.
    pub fn is_classical(&self) -> bool {
        self.pure.is_empty()
            && self.classical.iter().all(|c| match c {
                ClassicalElem::MAtom(_) => true,
                ClassicalElem::Set(q) => q.is_classical(),
            })
    }

    /// True iff `self` is a subqset of `other` (per-species counts and classical inclusion).
    pub fn is_subqset_of(&self, other: &QSet) -> bool {
        self.pure.iter().all(|(s, n)| *n <= other.multiplicity(s))
            && self.classical.is_subset(&other.classical)
    }
}

impl fmt::Display for QSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print_qset(self))
    }
}

impl std::str::FromStr for QSet {
    type Err = QSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_qset(s)
    }
}

/// Sum of the pure multiplicities plus the size of the classical part.
pub fn quasi_cardinal(q: &QSet) -> u64 {
    q.pure.values().sum::<u64>() + q.classical.len() as u64
}

/// The indistinguishability relation `≡` between quasi-sets: the same quantity
/// of m-atoms of each species, and extensionally equal classical parts.
pub fn indist(a: &QSet, b: &QSet) -> bool {
    if a.pure != b.pure || a.classical.len() != b.classical.len() {
        return false;
    }
    a.classical
        .iter()
        .all(|x| b.classical.iter().any(|y| x.extensionally_equal(y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineMode {
    Union,
    Intersection,
    Difference,
}

/// Set operations on quasi-sets. Pure parts combine per species by max, min and
/// truncated subtraction (both arguments are read as drawn from one common pool
/// of atoms); classical parts combine by the ordinary operation.
pub fn combine(mode: CombineMode, a: &QSet, b: &QSet) -> QSet {
    let species: BTreeSet<&Species> = a.pure.keys().chain(b.pure.keys()).collect();
    let mut out = QSet::default();
    for s in species {
        let (x, y) = (a.multiplicity(s), b.multiplicity(s));
        let n = match mode {
            CombineMode::Union => x.max(y),
            CombineMode::Intersection => x.min(y),
            CombineMode::Difference => x.saturating_sub(y),
        };
        out.add_atoms(s.clone(), n);
    }
    out.classical = match mode {
        CombineMode::Union => a.classical.union(&b.classical).cloned().collect(),
        CombineMode::Intersection => a.classical.intersection(&b.classical).cloned().collect(),
        CombineMode::Difference => a.classical.difference(&b.classical).cloned().collect(),
    };
    out
}

/// Subqset shapes of a quasi-set, each with the number of labeled subsets that
/// realize it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerProfile {
    entries: BTreeMap<QSet, u64>,
}

impl PowerProfile {
    pub fn entries(&self) -> impl Iterator<Item = (&QSet, u64)> {
        self.entries.iter().map(|(q, n)| (q, *n))
    }

    pub fn multiplicity(&self, shape: &QSet) -> u64 {
        self.entries.get(shape).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of labeled subqsets; equals `2^qc` of the source.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }
}

pub fn power_profile(q: &QSet) -> Result<PowerProfile, QSetError> {
    power_profile_bounded(q, DEFAULT_POWER_BOUND)
}

pub fn power_profile_bounded(q: &QSet, bound: u64) -> Result<PowerProfile, QSetError> {
    let qc = quasi_cardinal(q);
    if qc > bound || qc >= 64 {
        return Err(QSetError::SizeBound { qc, bound });
    }

    // Pure shapes with their binomial weights, one species at a time.
    let mut pure_shapes: Vec<(BTreeMap<Species, u64>, u64)> = vec![(BTreeMap::new(), 1)];
    for (s, n) in q.species() {
        let row = binomial_row(n);
        let mut next = Vec::with_capacity(pure_shapes.len() * (n as usize + 1));
        for (shape, weight) in &pure_shapes {
            for (k, c) in row.iter().enumerate() {
                let mut shape = shape.clone();
                if k > 0 {
                    shape.insert(s.clone(), k as u64);
                }
                next.push((shape, weight * c));
            }
        }
        pure_shapes = next;
    }

    let classical: Vec<&ClassicalElem> = q.classical.iter().collect();
    let mut entries = BTreeMap::new();
    for mask in 0u64..(1u64 << classical.len()) {
        let chosen: BTreeSet<ClassicalElem> = classical
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, c)| (*c).clone())
            .collect();
        for (pure, weight) in &pure_shapes {
            let shape = QSet {
                pure: pure.clone(),
                classical: chosen.clone(),
            };
            *entries.entry(shape).or_insert(0) += weight;
        }
    }
    Ok(PowerProfile { entries })
}

/// `C(n, 0..=n)` by Pascal's rule.
pub fn binomial_row(n: u64) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row
}

/// The strong singleton of an m-atom of species `s` drawn from `q`.
pub fn strong_singleton(q: &QSet, s: &Species) -> Result<QSet, QSetError> {
    if q.multiplicity(s) == 0 {
        return Err(QSetError::AbsentSpecies(s.clone()));
    }
    Ok(QSet::pure(s.clone(), 1))
}

/// Exchanges two same-species atoms throughout a concretization and reports
/// whether every realized subset keeps its shape up to `≡`.
pub fn permute_exchange(
    c: &LabeledConcretization,
    i: Label,
    j: Label,
) -> Result<(LabeledConcretization, bool), QSetError> {
    let after = c.exchange(i, j)?;
    let same_whole = indist(&c.quotient(), &after.quotient());
    let same_parts = c
        .realized_shapes()
        .iter()
        .zip(after.realized_shapes().iter())
        .all(|(a, b)| indist(a, b));
    Ok((after, same_whole && same_parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> Species {
        Species::new("s")
    }

    #[test]
    fn quasi_cardinal_examples() {
        assert_eq!(quasi_cardinal(&QSet::empty()), 0);
        assert_eq!(quasi_cardinal(&QSet::pure("s", 3)), 3);
        let q = QSet::pure("s", 2)
            .with_classical(ClassicalElem::MAtom("a".into()))
            .unwrap()
            .with_classical(ClassicalElem::MAtom("b".into()))
            .unwrap();
        assert_eq!(quasi_cardinal(&q), 4);
    }

    #[test]
    fn indist_examples() {
        assert!(indist(&QSet::pure("s", 2), &QSet::pure("s", 2)));
        assert!(!indist(&QSet::pure("s", 2), &QSet::pure("s", 3)));
        let qa = QSet::pure("s", 1)
            .with_classical(ClassicalElem::MAtom("a".into()))
            .unwrap();
        let qb = QSet::pure("s", 1)
            .with_classical(ClassicalElem::MAtom("b".into()))
            .unwrap();
        assert!(!indist(&qa, &qb));
    }

    #[test]
    fn combine_examples() {
        let u = combine(CombineMode::Union, &QSet::pure("s", 2), &QSet::pure("s", 1));
        assert_eq!(u, QSet::pure("s", 2));
        let a = QSet::from_parts([(s(), 2), (Species::new("t"), 1)], []).unwrap();
        let i = combine(CombineMode::Intersection, &a, &QSet::pure("s", 1));
        assert_eq!(i, QSet::pure("s", 1));
        assert_eq!(combine(CombineMode::Difference, &a, &a), QSet::empty());
    }

    #[test]
    fn power_profile_small_cases() {
        let p = power_profile(&QSet::pure("s", 3)).unwrap();
        let counts: Vec<u64> = (0..=3).map(|k| p.multiplicity(&QSet::pure("s", k))).collect();
        assert_eq!(counts, vec![1, 3, 3, 1]);
        assert_eq!(p.total(), 8);

        let p = power_profile(&QSet::empty()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.multiplicity(&QSet::empty()), 1);

        let q = QSet::pure("s", 1)
            .with_classical(ClassicalElem::MAtom("a".into()))
            .unwrap();
        assert_eq!(power_profile(&q).unwrap().total(), 4);
    }

    #[test]
    fn power_profile_bound() {
        let err = power_profile(&QSet::pure("s", 21)).unwrap_err();
        assert_eq!(err, QSetError::SizeBound { qc: 21, bound: 20 });
        assert!(power_profile_bounded(&QSet::pure("s", 21), 22).is_ok());
    }

    #[test]
    fn strong_singletons() {
        assert_eq!(strong_singleton(&QSet::pure("s", 3), &s()).unwrap(), QSet::pure("s", 1));
        let one = QSet::pure("s", 1);
        assert!(indist(&strong_singleton(&one, &s()).unwrap(), &one));
        assert_eq!(
            strong_singleton(&QSet::pure("t", 2), &s()),
            Err(QSetError::AbsentSpecies(s()))
        );
        let a = strong_singleton(&QSet::pure("s", 5), &s()).unwrap();
        let b = strong_singleton(&QSet::from_parts([(s(), 1), ("u".into(), 4)], []).unwrap(), &s())
            .unwrap();
        assert!(indist(&a, &b));
        assert!(a.is_subqset_of(&QSet::pure("s", 5)));
    }

    #[test]
    fn classical_members_reject_m_atoms() {
        assert_eq!(ClassicalElem::set(QSet::pure("s", 1)), Err(QSetError::PureInClassical));
        let inner = QSet::empty()
            .with_classical(ClassicalElem::MAtom("a".into()))
            .unwrap();
        let q = QSet::empty().with_classical(ClassicalElem::set(inner.clone()).unwrap()).unwrap();
        assert!(q.is_classical());
        assert!(QSet::empty()
            .with_classical(ClassicalElem::Set(inner.clone()))
            .unwrap()
            .with_classical(ClassicalElem::Set(inner))
            .is_err());
    }
}

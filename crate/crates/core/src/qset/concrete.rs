use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ClassicalElem, QSet, QSetError, Species};

/// Hidden label of one m-atom inside a [`LabeledConcretization`].
///
/// Labels carry no meaning outside the concretization that issued them; any
/// species-preserving relabeling yields an indistinguishable quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub(crate) usize);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0 + 1)
    }
}

/// A quasi-set with its m-atoms laid out as labeled atoms, plus a family of
/// realized labeled subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledConcretization {
    atoms: Vec<Species>,
    classical: BTreeSet<ClassicalElem>,
    realized: Vec<(BTreeSet<usize>, BTreeSet<ClassicalElem>)>,
}

impl LabeledConcretization {
    /// Lays out the atoms of `q` species by species.
    pub fn from_qset(q: &QSet) -> Self {
        let mut atoms = Vec::new();
        for (s, n) in q.species() {
            atoms.extend(std::iter::repeat_n(s.clone(), n as usize));
        }
        LabeledConcretization {
            atoms,
            classical: q.classical.clone(),
            realized: Vec::new(),
        }
    }

    pub(crate) fn from_atoms(atoms: Vec<Species>) -> Self {
        LabeledConcretization {
            atoms,
            classical: BTreeSet::new(),
            realized: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.atoms.len()).map(Label)
    }

    pub fn labels_of<'a>(&'a self, s: &'a Species) -> impl Iterator<Item = Label> + 'a {
        self.atoms
            .iter()
            .enumerate()
            .filter(move |(_, t)| *t == s)
            .map(|(i, _)| Label(i))
    }

    pub fn species_of(&self, l: Label) -> Result<&Species, QSetError> {
        self.atoms.get(l.0).ok_or(QSetError::UnknownLabel(l.0))
    }

    /// Adds a realization of `shape`, taking the lowest labels of each species.
    pub fn with_realized(mut self, shape: &QSet) -> Result<Self, QSetError> {
        let mut labels = BTreeSet::new();
        for (s, k) in shape.species() {
            let available: Vec<Label> = self.labels_of(s).collect();
            if (available.len() as u64) < k {
                return Err(QSetError::AbsentSpecies(s.clone()));
            }
            labels.extend(available.into_iter().take(k as usize).map(|l| l.0));
        }
        if !shape.classical.is_subset(&self.classical) {
            return Err(QSetError::PureInClassical);
        }
        self.realized.push((labels, shape.classical.clone()));
        Ok(self)
    }

    /// Adds a uniformly random labeled subset (atoms and classical members).
    pub fn with_random_subset<R: Rng + ?Sized>(mut self, rng: &mut R) -> Self {
        let labels = (0..self.atoms.len()).filter(|_| rng.gen_bool(0.5)).collect();
        let classical = self
            .classical
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        self.realized.push((labels, classical));
        self
    }

    pub(crate) fn quotient_of_labels<'a>(&self, labels: impl IntoIterator<Item = &'a usize>) -> QSet {
        let mut q = QSet::default();
        for &l in labels {
            q.add_atoms(self.atoms[l].clone(), 1);
        }
        q
    }

    /// The quasi-set this concretization realizes.
    pub fn quotient(&self) -> QSet {
        let mut q = self.quotient_of_labels(&(0..self.atoms.len()).collect::<Vec<_>>());
        q.classical = self.classical.clone();
        q
    }

    /// The shape of every realized subset, in realization order.
    pub fn realized_shapes(&self) -> Vec<QSet> {
        self.realized
            .iter()
            .map(|(labels, classical)| {
                let mut q = self.quotient_of_labels(labels);
                q.classical = classical.clone();
                q
            })
            .collect()
    }

    /// Swaps labels `i` and `j` in every realized subset.
    pub fn exchange(&self, i: Label, j: Label) -> Result<Self, QSetError> {
        let (si, sj) = (self.species_of(i)?, self.species_of(j)?);
        if si != sj {
            return Err(QSetError::SpeciesMismatch(si.clone(), sj.clone()));
        }
        let mut perm: Vec<usize> = (0..self.atoms.len()).collect();
        perm.swap(i.0, j.0);
        Ok(self.relabel(&perm))
    }

    /// Applies a label permutation (`perm[old] = new`) to every realized subset.
    /// The caller guarantees the permutation preserves species.
    pub(crate) fn relabel(&self, perm: &[usize]) -> Self {
        let realized = self
            .realized
            .iter()
            .map(|(labels, classical)| (labels.iter().map(|&l| perm[l]).collect(), classical.clone()))
            .collect();
        LabeledConcretization {
            atoms: self.atoms.clone(),
            classical: self.classical.clone(),
            realized,
        }
    }

    /// A uniformly random species-preserving permutation of the labels.
    pub(crate) fn random_permutation<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.atoms.len()).collect();
        let species: BTreeSet<&Species> = self.atoms.iter().collect();
        for s in species {
            let slots: Vec<usize> = self.labels_of(s).map(|l| l.0).collect();
            let mut images = slots.clone();
            images.shuffle(rng);
            for (from, to) in slots.into_iter().zip(images) {
                perm[from] = to;
            }
        }
        perm
    }

    /// Adjacent transpositions within each species; they generate the
    /// species-preserving permutation group.
    pub(crate) fn generators(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let species: BTreeSet<&Species> = self.atoms.iter().collect();
        for s in species {
            let slots: Vec<usize> = self.labels_of(s).map(|l| l.0).collect();
            out.extend(slots.windows(2).map(|w| (w[0], w[1])));
        }
        out
    }
}

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::lang::TypeExpr;
use crate::qset::{LabeledConcretization, QSet, Species};

use super::value::Value;
use super::ModelError;

/// Default limit on the number of elements in one domain.
pub const DEFAULT_DOMAIN_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    /// Every relation over the component domains.
    Standard,
    /// Only relations that are unions of orbits of the label permutations.
    Symmetric,
    /// Chosen per type; see [`DomainSpec`].
    Custom,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameKind::Standard => "standard",
            FrameKind::Symmetric => "symmetric",
            FrameKind::Custom => "custom",
        })
    }
}

/// How the domain of one relation type is populated in a custom frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    Full,
    Symmetric,
    /// Exactly these relations, each written as a set value.
    Listed(Vec<Value>),
}

/// Everything needed to build a [`Frame`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSpec {
    pub species: Vec<(Species, usize)>,
    pub classical: Vec<String>,
    pub types: BTreeSet<TypeExpr>,
    pub kind: FrameKind,
    /// Per-type choices for custom frames; unlisted types are symmetric.
    pub domains: BTreeMap<TypeExpr, DomainSpec>,
    pub budget: usize,
    pub max_depth: usize,
}

impl FrameSpec {
    /// One species `s` with `n_m` atoms and classical elements `a`, `b`, ...
    pub fn new(n_m: usize, n_classical: usize, kind: FrameKind) -> Self {
        FrameSpec {
            species: vec![(Species::new("s"), n_m)],
            classical: (0..n_classical).map(default_tag).collect(),
            types: BTreeSet::new(),
            kind,
            domains: BTreeMap::new(),
            budget: DEFAULT_DOMAIN_BUDGET,
            max_depth: usize::MAX,
        }
    }

    pub fn with_types<'a>(mut self, types: impl IntoIterator<Item = &'a TypeExpr>) -> Self {
        self.types.extend(types.into_iter().cloned());
        self
    }

    pub fn with_domain(mut self, t: TypeExpr, spec: DomainSpec) -> Self {
        self.kind = FrameKind::Custom;
        self.types.insert(t.clone());
        self.domains.insert(t, spec);
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn n_atoms(&self) -> usize {
        self.species.iter().map(|(_, n)| n).sum()
    }
}

fn default_tag(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("m{i}")
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Domain {
    pub ty: TypeExpr,
    pub size: usize,
    pub spec: DomainSpec,
    /// Elements of a relation domain; empty for base types.
    pub rels: Vec<FixedBitSet>,
    lookup: HashMap<FixedBitSet, usize>,
    /// Component domain ids and sizes of a relation type.
    pub comps: Vec<usize>,
    pub radix: Vec<usize>,
    pub stride: Vec<usize>,
    /// `gen_maps[g][e]` is the image of element `e` under generator `g`.
    pub gen_maps: Vec<Vec<usize>>,
    /// Pseudo-diagonal class of each element.
    pub class: Vec<usize>,
}

impl Domain {
    pub fn tuple_index(&self, parts: impl IntoIterator<Item = usize>) -> usize {
        parts.into_iter().zip(&self.stride).map(|(p, s)| p * s).sum()
    }

    fn decode(&self, mut idx: usize) -> Vec<usize> {
        self.radix
            .iter()
            .map(|&r| {
                let p = idx % r;
                idx /= r;
                p
            })
            .collect()
    }

    fn width(&self) -> usize {
        self.radix.iter().product()
    }
}

/// A finite frame: a labeled pure quasi-set of m-atoms, a classical set and
/// one domain per type. Every domain is closed under the species-preserving
/// permutations of the atom labels.
#[derive(Debug, Clone)]
pub struct Frame {
    kind: FrameKind,
    atoms: LabeledConcretization,
    species: Vec<(Species, usize)>,
    classical: Vec<String>,
    pub(crate) domains: Vec<Domain>,
    ids: BTreeMap<TypeExpr, usize>,
}

/// Builds every domain of `spec.types` and their components, bottom-up.
pub fn build_frame(spec: &FrameSpec) -> Result<Frame, ModelError> {
    if spec.classical.is_empty() {
        return Err(ModelError::EmptyClassical);
    }
    let mut seen = BTreeSet::new();
    for t in &spec.classical {
        if !seen.insert(t) {
            return Err(ModelError::BadValue(format!("duplicate classical element {t}")));
        }
    }
    let mut types = BTreeSet::from([TypeExpr::E1, TypeExpr::E2]);
    for t in spec.types.iter().chain(spec.domains.keys()) {
        if t.depth() > spec.max_depth {
            return Err(ModelError::DepthExceeded {
                ty: t.clone(),
                bound: spec.max_depth,
            });
        }
        t.closure(&mut types);
    }
    let mut order: Vec<TypeExpr> = types.into_iter().collect();
    order.sort_by_key(|t| (t.depth(), t.clone()));

    let mut layout = Vec::new();
    for (s, n) in &spec.species {
        layout.extend(std::iter::repeat_n(s.clone(), *n));
    }
    let atoms = LabeledConcretization::from_atoms(layout);
    let n = atoms.len();
    let generators: Vec<Vec<usize>> = atoms
        .generators()
        .into_iter()
        .map(|(i, j)| {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, j);
            p
        })
        .collect();

    let mut frame = Frame {
        kind: spec.kind,
        atoms,
        species: spec.species.iter().filter(|(_, n)| *n > 0).cloned().collect(),
        classical: spec.classical.clone(),
        domains: Vec::new(),
        ids: BTreeMap::new(),
    };
    for t in order {
        let d = match &t {
            TypeExpr::E1 => base_domain(t.clone(), n, generators.clone()),
            TypeExpr::E2 => {
                let m = spec.classical.len();
                base_domain(t.clone(), m, vec![(0..m).collect(); generators.len()])
            }
            TypeExpr::Tuple(_) => {
                let ds = match spec.kind {
                    FrameKind::Standard => DomainSpec::Full,
                    FrameKind::Symmetric => DomainSpec::Symmetric,
                    FrameKind::Custom => spec.domains.get(&t).cloned().unwrap_or(DomainSpec::Symmetric),
                };
                frame.relation_domain(t.clone(), ds, spec.budget)?
            }
        };
        frame.ids.insert(t, frame.domains.len());
        frame.domains.push(d);
    }
    Ok(frame)
}

fn base_domain(ty: TypeExpr, size: usize, gen_maps: Vec<Vec<usize>>) -> Domain {
    let class = classes(size, &gen_maps);
    Domain {
        ty,
        size,
        spec: DomainSpec::Full,
        rels: Vec::new(),
        lookup: HashMap::new(),
        comps: Vec::new(),
        radix: Vec::new(),
        stride: Vec::new(),
        gen_maps,
        class,
    }
}

/// Orbit id of each element under the group generated by `maps`.
fn classes(size: usize, maps: &[Vec<usize>]) -> Vec<usize> {
    let mut class = vec![usize::MAX; size];
    let mut next = 0;
    for start in 0..size {
        if class[start] != usize::MAX {
            continue;
        }
        class[start] = next;
        let mut stack = vec![start];
        while let Some(e) = stack.pop() {
            for m in maps {
                let img = m[e];
                if class[img] == usize::MAX {
                    class[img] = next;
                    stack.push(img);
                }
            }
        }
        next += 1;
    }
    class
}

fn bits_from_mask(width: usize, mask: u64) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(width);
    for i in 0..width {
        if mask >> i & 1 == 1 {
            b.insert(i);
        }
    }
    b
}

fn over_budget(ty: &TypeExpr, log2: usize, budget: usize) -> Result<(), ModelError> {
    if log2 >= 63 || (1usize << log2) > budget {
        return Err(ModelError::BudgetExceeded {
            ty: ty.clone(),
            log2_size: log2,
            budget,
        });
    }
    Ok(())
}

impl Frame {
    fn relation_domain(&self, ty: TypeExpr, spec: DomainSpec, budget: usize) -> Result<Domain, ModelError> {
        let comp_types = ty.components().expect("relation type");
        let comps: Vec<usize> = comp_types.iter().map(|c| self.ids[c]).collect();
        let radix: Vec<usize> = comps.iter().map(|&c| self.domains[c].size).collect();
        let mut stride = Vec::with_capacity(radix.len());
        let mut acc = 1usize;
        for &r in &radix {
            stride.push(acc);
            acc = acc.saturating_mul(r);
        }
        let mut d = Domain {
            ty: ty.clone(),
            size: 0,
            spec: spec.clone(),
            rels: Vec::new(),
            lookup: HashMap::new(),
            comps,
            radix,
            stride,
            gen_maps: Vec::new(),
            class: Vec::new(),
        };
        let width = d.width();
        let n_gens = self.domains[0].gen_maps.len();
        let tuple_maps: Vec<Vec<usize>> = (0..n_gens)
            .map(|g| {
                let maps: Vec<&Vec<usize>> = d.comps.iter().map(|&c| &self.domains[c].gen_maps[g]).collect();
                (0..width)
                    .map(|t| d.tuple_index(d.decode(t).iter().zip(&maps).map(|(&p, m)| m[p])))
                    .collect()
            })
            .collect();
        d.rels = match &spec {
            DomainSpec::Full => {
                over_budget(&ty, width, budget)?;
                (0..1u64 << width).map(|m| bits_from_mask(width, m)).collect()
            }
            DomainSpec::Symmetric => {
                let orbit = classes(width, &tuple_maps);
                let k = orbit.iter().max().map_or(0, |m| m + 1);
                over_budget(&ty, k, budget)?;
                (0..1u64 << k)
                    .map(|mask| {
                        let mut b = FixedBitSet::with_capacity(width);
                        for (t, &o) in orbit.iter().enumerate() {
                            if mask >> o & 1 == 1 {
                                b.insert(t);
                            }
                        }
                        b
                    })
                    .collect()
            }
            DomainSpec::Listed(values) => {
                if values.len() > budget {
                    over_budget(&ty, usize::BITS as usize - values.len().leading_zeros() as usize, budget)?;
                }
                let mut out: Vec<FixedBitSet> = Vec::new();
                for v in values {
                    let b = self.relation_bits(&d, v)?;
                    if !out.contains(&b) {
                        out.push(b);
                    }
                }
                out
            }
        };
        d.size = d.rels.len();
        d.lookup = d.rels.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        d.gen_maps = tuple_maps
            .iter()
            .map(|tm| {
                d.rels
                    .iter()
                    .map(|r| {
                        let img = map_bits(r, tm, width);
                        d.lookup.get(&img).copied().ok_or_else(|| ModelError::NotClosed(ty.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        d.class = classes(d.size, &d.gen_maps);
        Ok(d)
    }

    fn relation_bits(&self, d: &Domain, v: &Value) -> Result<FixedBitSet, ModelError> {
        let Value::Set(items) = v else {
            return Err(ModelError::BadValue(format!("{v} is not a set value for {}", d.ty)));
        };
        let comp_types = d.ty.components().expect("relation type");
        let mut b = FixedBitSet::with_capacity(d.width());
        for item in items {
            let parts: Vec<&Value> = match (item, comp_types.len()) {
                (Value::Tuple(parts), n) if parts.len() == n && n > 1 => parts.iter().collect(),
                (single, 1) => vec![single],
                _ => {
                    return Err(ModelError::BadValue(format!(
                        "{item} does not fit the components of {}",
                        d.ty
                    )))
                }
            };
            let idx = parts
                .iter()
                .zip(comp_types)
                .map(|(p, t)| self.resolve(t, p))
                .collect::<Result<Vec<_>, _>>()?;
            b.insert(d.tuple_index(idx));
        }
        Ok(b)
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn species(&self) -> &[(Species, usize)] {
        &self.species
    }

    pub fn classical(&self) -> &[String] {
        &self.classical
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeExpr> {
        self.domains.iter().map(|d| &d.ty)
    }

    pub fn has_type(&self, t: &TypeExpr) -> bool {
        self.ids.contains_key(t)
    }

    pub(crate) fn domain_id(&self, t: &TypeExpr) -> Result<usize, ModelError> {
        self.ids.get(t).copied().ok_or_else(|| ModelError::MissingType(t.clone()))
    }

    pub(crate) fn domain(&self, t: &TypeExpr) -> Result<&Domain, ModelError> {
        Ok(&self.domains[self.domain_id(t)?])
    }

    pub fn domain_size(&self, t: &TypeExpr) -> Result<usize, ModelError> {
        Ok(self.domain(t)?.size)
    }

    /// How the domain of `t` was populated.
    pub fn domain_spec(&self, t: &TypeExpr) -> Result<&DomainSpec, ModelError> {
        Ok(&self.domain(t)?.spec)
    }

    pub(crate) fn concretization(&self) -> &LabeledConcretization {
        &self.atoms
    }

    /// The pure quasi-set of m-atoms.
    pub fn m(&self) -> QSet {
        self.atoms.quotient()
    }

    /// The element of type `t` written as `v`.
    pub fn resolve(&self, t: &TypeExpr, v: &Value) -> Result<usize, ModelError> {
        let bad = || ModelError::BadValue(format!("{v} is not an element of the domain of {t}"));
        match (t, v) {
            (TypeExpr::E1, Value::Atom(k)) if *k < self.n_atoms() => Ok(*k),
            (TypeExpr::E2, Value::Tag(tag)) => self.classical.iter().position(|c| c == tag).ok_or_else(bad),
            (TypeExpr::Tuple(_), _) => {
                let d = self.domain(t)?;
                let b = self.relation_bits(d, v)?;
                d.lookup.get(&b).copied().ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }

    /// The written form of element `e` of type `t`.
    pub fn value(&self, t: &TypeExpr, e: usize) -> Result<Value, ModelError> {
        let d = self.domain(t)?;
        if e >= d.size {
            return Err(ModelError::BadValue(format!("element {e} out of range for {t}")));
        }
        Ok(match t {
            TypeExpr::E1 => Value::Atom(e),
            TypeExpr::E2 => Value::Tag(self.classical[e].clone()),
            TypeExpr::Tuple(comps) => {
                let items = d.rels[e]
                    .ones()
                    .map(|idx| {
                        let parts = d.decode(idx);
                        let vals: Vec<Value> = parts
                            .iter()
                            .zip(comps)
                            .map(|(&p, ct)| self.value(ct, p))
                            .collect::<Result<_, _>>()?;
                        Ok(if vals.len() == 1 {
                            vals.into_iter().next().unwrap()
                        } else {
                            Value::Tuple(vals)
                        })
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?;
                Value::Set(items)
            }
        })
    }

    /// Images of every element of every domain under the atom permutation
    /// `perm` (`perm[old] = new`), indexed like the domains.
    pub(crate) fn induced(&self, perm: &[usize]) -> Vec<Vec<usize>> {
        let mut maps: Vec<Vec<usize>> = Vec::with_capacity(self.domains.len());
        for d in &self.domains {
            let m = match &d.ty {
                TypeExpr::E1 => perm.to_vec(),
                TypeExpr::E2 => (0..d.size).collect(),
                TypeExpr::Tuple(_) => {
                    let width = d.width();
                    let tm: Vec<usize> = (0..width)
                        .map(|t| d.tuple_index(d.decode(t).iter().zip(&d.comps).map(|(&p, &c)| maps[c][p])))
                        .collect();
                    d.rels
                        .iter()
                        .map(|r| d.lookup[&map_bits(r, &tm, width)])
                        .collect()
                }
            };
            maps.push(m);
        }
        maps
    }
}

fn map_bits(r: &FixedBitSet, tuple_map: &[usize], width: usize) -> FixedBitSet {
    let mut img = FixedBitSet::with_capacity(width);
    for t in r.ones() {
        img.insert(tuple_map[t]);
    }
    img
}

/// The pairs of indistinguishable elements of one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoDiagonal {
    pub ty: TypeExpr,
    class: Vec<usize>,
}

impl PseudoDiagonal {
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.class[a] == self.class[b]
    }

    pub fn len(&self) -> usize {
        self.pairs().count()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.class.len();
        (0..n).flat_map(move |a| (0..n).filter(move |&b| self.contains(a, b)).map(move |b| (a, b)))
    }

    /// Number of indistinguishability classes.
    pub fn classes(&self) -> usize {
        self.class.iter().max().map_or(0, |m| m + 1)
    }
}

/// Elements of the domain of `t` related by some species-preserving
/// permutation of the atom labels.
pub fn pseudo_diagonal(f: &Frame, t: &TypeExpr) -> Result<PseudoDiagonal, ModelError> {
    if *t == TypeExpr::E1 {
        return Err(ModelError::IdentityAtE1);
    }
    Ok(PseudoDiagonal {
        ty: t.clone(),
        class: f.domain(t)?.class.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_type;

    fn ty(s: &str) -> TypeExpr {
        parse_type(s).unwrap()
    }

    #[test]
    fn standard_and_symmetric_sizes() {
        let p = ty("<e1>");
        let std = build_frame(&FrameSpec::new(2, 1, FrameKind::Standard).with_types([&p])).unwrap();
        assert_eq!(std.domain_size(&p).unwrap(), 4);
        let sym = build_frame(&FrameSpec::new(2, 1, FrameKind::Symmetric).with_types([&p])).unwrap();
        assert_eq!(sym.domain_size(&p).unwrap(), 2);
        let values: Vec<String> = (0..2).map(|e| sym.value(&p, e).unwrap().to_string()).collect();
        assert_eq!(values, ["{}", "{#1, #2}"]);
        let empty = build_frame(&FrameSpec::new(0, 1, FrameKind::Standard).with_types([&p])).unwrap();
        assert_eq!(empty.domain_size(&p).unwrap(), 1);
        assert_eq!(empty.value(&p, 0).unwrap(), Value::Set(vec![]));
    }

    #[test]
    fn empty_classical_rejected() {
        assert_eq!(build_frame(&FrameSpec::new(1, 0, FrameKind::Standard)).unwrap_err(), ModelError::EmptyClassical);
    }

    #[test]
    fn budget() {
        let t = ty("<<e1,e1>>");
        let spec = FrameSpec::new(3, 1, FrameKind::Standard).with_types([&t]);
        assert!(matches!(build_frame(&spec), Err(ModelError::BudgetExceeded { .. })));
    }

    #[test]
    fn pseudo_diagonal_examples() {
        let p = ty("<e1>");
        let f = build_frame(&FrameSpec::new(2, 2, FrameKind::Standard).with_types([&p])).unwrap();
        let e2 = pseudo_diagonal(&f, &TypeExpr::E2).unwrap();
        assert_eq!(e2.pairs().collect::<Vec<_>>(), [(0, 0), (1, 1)]);
        let d = pseudo_diagonal(&f, &p).unwrap();
        let one = f.resolve(&p, &"{#1}".parse().unwrap()).unwrap();
        let two = f.resolve(&p, &"{#2}".parse().unwrap()).unwrap();
        assert!(d.contains(one, two));
        assert!((0..4).all(|a| d.contains(a, a)));
        assert_eq!(d.classes(), 3);
        assert_eq!(pseudo_diagonal(&f, &TypeExpr::E1).unwrap_err(), ModelError::IdentityAtE1);
    }

    #[test]
    fn listed_domains_must_be_closed() {
        let p = ty("<e1>");
        let open = FrameSpec::new(2, 1, FrameKind::Custom)
            .with_domain(p.clone(), DomainSpec::Listed(vec!["{#1}".parse().unwrap()]));
        assert_eq!(build_frame(&open).unwrap_err(), ModelError::NotClosed(p.clone()));
        let closed = FrameSpec::new(2, 1, FrameKind::Custom).with_domain(
            p.clone(),
            DomainSpec::Listed(vec!["{#1}".parse().unwrap(), "{#2}".parse().unwrap()]),
        );
        assert_eq!(build_frame(&closed).unwrap().domain_size(&p).unwrap(), 2);
    }

    #[test]
    fn induced_maps_respect_structure() {
        let t = ty("<<e1>,e2>");
        let f = build_frame(&FrameSpec::new(3, 2, FrameKind::Standard).with_types([&t]).with_budget(1 << 20)).unwrap();
        let maps = f.induced(&[1, 2, 0]);
        let p = ty("<e1>");
        let id = f.domain_id(&p).unwrap();
        let a = f.resolve(&p, &"{#1, #2}".parse().unwrap()).unwrap();
        assert_eq!(f.value(&p, maps[id][a]).unwrap().to_string(), "{#2, #3}");
        let tid = f.domain_id(&t).unwrap();
        assert!(maps[tid].iter().collect::<BTreeSet<_>>().len() == f.domain_size(&t).unwrap());
    }
}

//! Loopless matroids given by bases, with rank, closure, the lattice of
//! flats, flag enumeration and single-element deletion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::set::ElementSet;

/// A flat is an [`ElementSet`] that is closed in its matroid.
pub type Flat = ElementSet;

/// Default cap on `|E|` for exhaustive flat enumeration.
pub const DEFAULT_ELEMENT_LIMIT: usize = 16;

/// A loopless matroid on a finite set of labeled elements.
#[derive(Clone, Debug)]
pub struct Matroid {
    ground: ElementSet,
    bases: Vec<ElementSet>,
    rank: usize,
    lattice: OnceLock<FlatLattice>,
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.bases == other.bases
    }
}

impl Eq for Matroid {}

impl Matroid {
    /// Validates a basis family: equal sizes, basis exchange, no loops.
    pub fn from_bases(elements: &[u32], bases: &[Vec<u32>]) -> Result<Self> {
        let mut ground = ElementSet::EMPTY;
        for &e in elements {
            let s = ElementSet::try_from_labels([e])?;
            if ground.contains(e) {
                return Err(Error::DuplicateElement(e));
            }
            ground = ground.union(s);
        }
        let sets = bases
            .iter()
            .map(|b| ElementSet::try_from_labels(b.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_basis_sets(ground, sets)
    }

    pub fn from_basis_sets(ground: ElementSet, bases: Vec<ElementSet>) -> Result<Self> {
        if ground.is_empty() {
            return Err(Error::EmptyGroundSet);
        }
        let bases: Vec<ElementSet> = bases.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let first = *bases.first().ok_or(Error::NoBases)?;
        for b in &bases {
            if !b.is_subset(ground) {
                return Err(Error::BasisOutsideGround(b.to_string()));
            }
            if b.len() != first.len() {
                return Err(Error::UnequalBasisSizes(first.len(), b.len()));
            }
        }
        check_exchange(&bases)?;
        let covered = bases.iter().fold(ElementSet::EMPTY, |acc, b| acc.union(*b));
        if let Some(e) = ground.difference(covered).min() {
            return Err(Error::Loop(e));
        }
        Ok(Matroid {
            ground,
            rank: first.len(),
            bases,
            lattice: OnceLock::new(),
        })
    }

    /// Builds a matroid from its full list of flats (including `∅` and `E`).
    ///
    /// The list must be intersection-closed and satisfy the cover partition
    /// axiom. Bases are reconstructed as the independent sets of full rank.
    pub fn from_flats(elements: &[u32], flats: &[Vec<u32>]) -> Result<Self> {
        let ground = ElementSet::try_from_labels(elements.iter().copied())?;
        if ground.len() != elements.len() {
            let mut seen = ElementSet::EMPTY;
            for &e in elements {
                if seen.contains(e) {
                    return Err(Error::DuplicateElement(e));
                }
                seen.insert(e);
            }
        }
        if ground.is_empty() {
            return Err(Error::EmptyGroundSet);
        }
        let sets: BTreeSet<ElementSet> = flats
            .iter()
            .map(|f| ElementSet::try_from_labels(f.iter().copied()))
            .collect::<Result<_>>()?;
        let bad = |msg: String| Error::InvalidFlats(msg);
        if !sets.contains(&ElementSet::EMPTY) {
            return Err(bad("empty set missing (or loops present)".into()));
        }
        if !sets.contains(&ground) {
            return Err(bad("ground set missing".into()));
        }
        for f in &sets {
            if !f.is_subset(ground) {
                return Err(bad(format!("{{{f}}} is not inside the ground set")));
            }
            for g in &sets {
                if !sets.contains(&f.intersection(*g)) {
                    return Err(bad(format!("{{{f}}} ∩ {{{g}}} is not listed")));
                }
            }
        }
        let sets: Vec<ElementSet> = sets.into_iter().collect();
        let closure = |s: ElementSet| {
            sets.iter()
                .filter(|f| s.is_subset(**f))
                .fold(ground, |acc, f| acc.intersection(*f))
        };
        // Partition axiom: the minimal flats strictly above F split E \ F.
        for &f in &sets {
            if f == ground {
                continue;
            }
            let mut covered = ElementSet::EMPTY;
            for &g in &sets {
                let minimal = f.is_proper_subset(g)
                    && !sets
                        .iter()
                        .any(|h| f.is_proper_subset(*h) && h.is_proper_subset(g));
                if minimal {
                    let part = g.difference(f);
                    if !part.intersection(covered).is_empty() {
                        return Err(bad(format!("covers of {{{f}}} overlap")));
                    }
                    covered = covered.union(part);
                }
            }
            if covered != ground.difference(f) {
                return Err(bad(format!("covers of {{{f}}} miss elements")));
            }
        }
        // Height of each flat in the lattice gives the rank function.
        let mut height: HashMap<ElementSet, usize> = HashMap::new();
        for &f in &sets {
            let h = sets
                .iter()
                .filter(|g| g.is_proper_subset(f))
                .map(|g| height[g] + 1)
                .max()
                .unwrap_or(0);
            height.insert(f, h);
        }
        let rank = height[&ground];
        let bases: Vec<ElementSet> = ground
            .subsets()
            .filter(|s| s.len() == rank && height[&closure(*s)] == rank)
            .filter(|s| {
                // independent iff no element lies in the closure of the rest
                s.iter().all(|e| !closure(s.without(e)).contains(e))
            })
            .collect();
        Self::from_basis_sets(ground, bases)
    }

    /// Uniform matroid `U_{rank,n}` on `{1..n}`.
    pub fn uniform(rank: usize, n: usize) -> Result<Self> {
        let ground: ElementSet = (1..=n as u32).collect();
        let bases = ground.subsets().filter(|s| s.len() == rank).collect();
        Self::from_basis_sets(ground, bases)
    }

    /// Boolean matroid (every element a coloop) on the given labels.
    pub fn boolean(labels: &[u32]) -> Result<Self> {
        Self::from_bases(labels, &[labels.to_vec()])
    }

    pub fn ground(&self) -> ElementSet {
        self.ground
    }

    pub fn elements(&self) -> Vec<u32> {
        self.ground.to_vec()
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn bases(&self) -> &[ElementSet] {
        &self.bases
    }

    /// Rank of the matroid, `d + 1`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension `d` of the Bergman fan, one less than the rank.
    pub fn dim(&self) -> usize {
        self.rank - 1
    }

    pub fn rank_of_set(&self, s: ElementSet) -> usize {
        self.bases
            .iter()
            .map(|b| b.intersection(s).len())
            .max()
            .unwrap_or(0)
    }

    pub fn is_independent(&self, s: ElementSet) -> bool {
        self.bases.iter().any(|b| s.is_subset(*b))
    }

    pub fn closure(&self, s: ElementSet) -> Flat {
        let r = self.rank_of_set(s);
        self.ground
            .iter()
            .filter(|&e| s.contains(e) || self.rank_of_set(s.with(e)) == r)
            .collect()
    }

    pub fn is_flat(&self, s: ElementSet) -> bool {
        s.is_subset(self.ground) && self.closure(s) == s
    }

    /// The lattice of flats, computed once with [`DEFAULT_ELEMENT_LIMIT`].
    pub fn lattice(&self) -> Result<&FlatLattice> {
        if let Some(l) = self.lattice.get() {
            return Ok(l);
        }
        let l = self.flat_lattice_with_limit(DEFAULT_ELEMENT_LIMIT)?;
        let _ = self.lattice.set(l);
        Ok(self.lattice.get().expect("just set"))
    }

    pub fn flat_lattice_with_limit(&self, limit: usize) -> Result<FlatLattice> {
        if self.len() > limit {
            return Err(Error::TooManyElements { n: self.len(), limit });
        }
        let flats: BTreeSet<Flat> = self.ground.subsets().map(|s| self.closure(s)).collect();
        Ok(FlatLattice::new(self.ground, flats.into_iter().collect(), |f| {
            self.rank_of_set(f)
        }))
    }

    /// Every maximal chain `F_1 < ... < F_d` of nontrivial flats, in lex order.
    pub fn maximal_chains(&self) -> Result<Vec<Chain>> {
        Ok(self.lattice()?.maximal_chains())
    }

    /// `M \ i`: bases are the maximal independent sets avoiding `i`.
    pub fn delete(&self, i: u32) -> Result<Matroid> {
        if !self.ground.contains(i) {
            return Err(Error::NotInGroundSet(i));
        }
        if self.len() < 2 {
            return Err(Error::DeleteLastElement);
        }
        let rest = self.ground.without(i);
        let r = self.rank_of_set(rest);
        let bases = self
            .bases
            .iter()
            .map(|b| b.intersection(rest))
            .filter(|b| b.len() == r)
            .collect();
        Matroid::from_basis_sets(rest, bases)
    }

    pub fn is_coloop(&self, i: u32) -> Result<bool> {
        if !self.ground.contains(i) {
            return Err(Error::NotInGroundSet(i));
        }
        Ok(self.rank_of_set(self.ground.without(i)) + 1 == self.rank)
    }

    /// The set `S_i` of flats `F` with `F` and `F ∪ i` distinct nontrivial
    /// flats, ordered by (cardinality, lex) so the order refines inclusion.
    pub fn s_set(&self, i: u32) -> Result<Vec<Flat>> {
        let single = ElementSet::try_from_labels([i])?;
        if !self.ground.contains(i) {
            return Err(Error::NotInGroundSet(i));
        }
        if !self.is_flat(single) {
            return Err(Error::NotAFlat(i));
        }
        let lattice = self.lattice()?;
        Ok(lattice
            .nontrivial()
            .iter()
            .copied()
            .filter(|f| !f.contains(i))
            .filter(|f| {
                let up = f.with(i);
                up != self.ground && lattice.contains(up)
            })
            .collect())
    }

    /// For each nontrivial flat `G` of `M \ i`, its closure in `M`.
    pub fn closure_map(&self, i: u32) -> Result<BTreeMap<Flat, Flat>> {
        let minor = self.delete(i)?;
        let lattice = minor.lattice()?;
        Ok(lattice
            .nontrivial()
            .iter()
            .map(|&g| (g, self.closure(g)))
            .collect())
    }

    /// Image of the matroid under an injective relabeling of its elements.
    pub fn relabel(&self, map: &BTreeMap<u32, u32>) -> Result<Matroid> {
        let keys: ElementSet = map.keys().copied().collect();
        if keys != self.ground || map.len() != self.len() {
            return Err(Error::NotBijective);
        }
        let image = ElementSet::try_from_labels(map.values().copied())?;
        if image.len() != self.len() {
            return Err(Error::NotBijective);
        }
        let f = |e: u32| map[&e];
        let bases = self.bases.iter().map(|b| b.map_labels(f)).collect();
        Matroid::from_basis_sets(image, bases)
    }

    /// Bases as plain label lists, for serialization.
    pub fn basis_lists(&self) -> Vec<Vec<u32>> {
        self.bases.iter().map(|b| b.to_vec()).collect()
    }
}

fn check_exchange(bases: &[ElementSet]) -> Result<()> {
    let set: BTreeSet<ElementSet> = bases.iter().copied().collect();
    for &b1 in bases {
        for &b2 in bases {
            for x in b1.difference(b2).iter() {
                let ok = b2
                    .difference(b1)
                    .iter()
                    .any(|y| set.contains(&b1.without(x).with(y)));
                if !ok {
                    return Err(Error::ExchangeViolation {
                        b1: b1.to_string(),
                        b2: b2.to_string(),
                        x,
                    });
                }
            }
        }
    }
    Ok(())
}

/// A chain `F_1 < F_2 < ... < F_m` of nontrivial flats.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain(pub Vec<Flat>);

impl Chain {
    pub fn flats(&self) -> &[Flat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All flats of a matroid with ranks and the cover relation.
#[derive(Clone, Debug)]
pub struct FlatLattice {
    ground: ElementSet,
    flats: Vec<Flat>,
    ranks: Vec<usize>,
    covers: Vec<Vec<usize>>,
    index: HashMap<Flat, usize>,
}

impl FlatLattice {
    fn new(ground: ElementSet, flats: Vec<Flat>, rank: impl Fn(Flat) -> usize) -> Self {
        let ranks: Vec<usize> = flats.iter().map(|&f| rank(f)).collect();
        let index = flats.iter().enumerate().map(|(k, &f)| (f, k)).collect();
        let covers = flats
            .iter()
            .enumerate()
            .map(|(a, fa)| {
                flats
                    .iter()
                    .enumerate()
                    .filter(|&(b, fb)| fa.is_proper_subset(*fb) && ranks[b] == ranks[a] + 1)
                    .map(|(b, _)| b)
                    .collect()
            })
            .collect();
        FlatLattice {
            ground,
            flats,
            ranks,
            covers,
            index,
        }
    }

    /// All flats in canonical order; the first is `∅` and the last is `E`.
    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    /// Flats other than `∅` and `E`.
    pub fn nontrivial(&self) -> &[Flat] {
        let n = self.flats.len();
        if n <= 2 {
            &[]
        } else {
            &self.flats[1..n - 1]
        }
    }

    pub fn contains(&self, f: Flat) -> bool {
        self.index.contains_key(&f)
    }

    pub fn rank(&self, f: Flat) -> Option<usize> {
        self.index.get(&f).map(|&k| self.ranks[k])
    }

    /// Flats covering `f`, in canonical order.
    pub fn covers(&self, f: Flat) -> Vec<Flat> {
        self.index
            .get(&f)
            .map(|&k| self.covers[k].iter().map(|&c| self.flats[c]).collect())
            .unwrap_or_default()
    }

    pub fn maximal_chains(&self) -> Vec<Chain> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.extend_chain(0, &mut stack, &mut out);
        out
    }

    fn extend_chain(&self, at: usize, stack: &mut Vec<Flat>, out: &mut Vec<Chain>) {
        if self.flats[at] == self.ground {
            stack.pop();
            out.push(Chain(stack.clone()));
            stack.push(self.ground);
            return;
        }
        for &c in &self.covers[at] {
            stack.push(self.flats[c]);
            self.extend_chain(c, stack, out);
            stack.pop();
        }
    }

    /// Every chain of nontrivial flats, including the empty chain.
    pub fn all_chains(&self) -> Vec<Chain> {
        let nt = self.nontrivial();
        let mut out = vec![Chain(Vec::new())];
        let mut frontier: Vec<(Vec<Flat>, usize)> =
            (0..nt.len()).map(|k| (vec![nt[k]], k)).collect();
        while let Some((chain, last)) = frontier.pop() {
            for k in last + 1..nt.len() {
                if nt[last].is_proper_subset(nt[k]) {
                    let mut next = chain.clone();
                    next.push(nt[k]);
                    frontier.push((next, k));
                }
            }
            out.push(Chain(chain));
        }
        out.sort();
        out
    }
}

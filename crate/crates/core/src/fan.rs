//! Embedded simplicial fans with exact rational ray generators.
//!
//! Cones are stored explicitly in every dimension (the face closure is
//! materialized), each as the sorted list of its ray indices.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::matroid::{Flat, Matroid};
use crate::poly::{Rational, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub label: VarId,
    pub vector: Vector,
}

/// A cone given by the sorted indices of its rays. The empty cone is the
/// origin.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Cone(SmallVec<[usize; 6]>);

impl Cone {
    pub fn new<I: IntoIterator<Item = usize>>(rays: I) -> Self {
        let mut v: SmallVec<[usize; 6]> = rays.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Cone(v)
    }

    pub fn origin() -> Self {
        Cone::default()
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|r| other.contains_ray(*r))
    }

    pub fn is_disjoint(&self, other: &Cone) -> bool {
        self.0.iter().all(|r| !other.contains_ray(*r))
    }

    pub fn union(&self, other: &Cone) -> Cone {
        Cone::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn without(&self, r: usize) -> Cone {
        Cone(self.0.iter().copied().filter(|&x| x != r).collect())
    }

    pub fn with(&self, r: usize) -> Cone {
        Cone::new(self.0.iter().copied().chain([r]))
    }

    /// All faces, including the origin and the cone itself.
    pub fn faces(&self) -> impl Iterator<Item = Cone> + '_ {
        let n = self.0.len();
        (0u64..(1u64 << n)).map(move |mask| {
            Cone(
                (0..n)
                    .filter(|k| mask & (1 << k) != 0)
                    .map(|k| self.0[k])
                    .collect(),
            )
        })
    }
}

impl Ord for Cone {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}>", self.0.as_slice())
    }
}

/// Weights on the maximal cones of a fan.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MinkowskiWeight(pub BTreeMap<Cone, Rational>);

impl MinkowskiWeight {
    pub fn constant(fan: &SimplicialFan, c: Rational) -> Self {
        MinkowskiWeight(fan.maximal_cones().into_iter().map(|s| (s, c.clone())).collect())
    }

    pub fn get(&self, cone: &Cone) -> Rational {
        self.0.get(cone).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(Zero::is_zero)
    }

    /// The weight on a refinement: each maximal cone of `fine` takes the
    /// weight of the maximal cone of `coarse` containing its interior.
    pub fn pull_back(&self, coarse: &SimplicialFan, fine: &SimplicialFan) -> Result<MinkowskiWeight> {
        let top = coarse.maximal_cones();
        let mut out = BTreeMap::new();
        for c in fine.maximal_cones() {
            let mut point = vec![Rational::zero(); fine.ambient_dim()];
            for v in fine.vectors(&c) {
                for (a, b) in point.iter_mut().zip(v) {
                    *a += b;
                }
            }
            // A ray shared with the coarse fan must be a ray of the host.
            let shared: Vec<usize> = c
                .rays()
                .iter()
                .filter_map(|&k| {
                    let ray = fine.ray(k);
                    coarse.index_of(ray.label).filter(|&j| coarse.ray(j).vector == ray.vector)
                })
                .collect();
            let host = top
                .iter()
                .filter(|s| shared.iter().all(|&k| s.contains_ray(k)))
                .find(|s| interior_contains(coarse, s, &point))
                .ok_or(Error::WeightShape)?;
            out.insert(c, self.get(host));
        }
        Ok(MinkowskiWeight(out))
    }
}

/// True when `point` is a strictly positive combination of the rays of `s`.
fn interior_contains(fan: &SimplicialFan, s: &Cone, point: &Vector) -> bool {
    let vs = fan.vectors(s);
    let rows: Vec<Vector> = (0..point.len())
        .map(|r| {
            let mut row: Vector = vs.iter().map(|v| v[r].clone()).collect();
            row.push(-point[r].clone());
            row
        })
        .collect();
    linalg::nullspace(&rows, vs.len() + 1).iter().any(|k| {
        let last = &k[vs.len()];
        !last.is_zero() && k[..vs.len()].iter().all(|x| (x / last).is_positive())
    })
}

/// A `(d-1)`-cone and its maximal cofaces, each with the opposite ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    pub tau: Cone,
    pub cofaces: Vec<(Cone, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BalancingReport {
    pub checked: usize,
    pub violations: Vec<Cone>,
}

impl BalancingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A simplicial fan in `Q^ambient`.
#[derive(Clone, Debug)]
pub struct SimplicialFan {
    rays: Vec<Ray>,
    cones: BTreeSet<Cone>,
    dim: usize,
    ambient: usize,
    index: HashMap<VarId, usize>,
}

impl PartialEq for SimplicialFan {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.signature() == other.signature()
    }
}

type Signature = (BTreeMap<VarId, Vector>, BTreeSet<BTreeSet<VarId>>);

impl SimplicialFan {
    /// Builds a fan from rays and generating cones; faces are added and every
    /// generating cone is checked to be simplicial.
    pub fn new<I>(rays: Vec<Ray>, generators: I, ambient: usize) -> Result<Self>
    where
        I: IntoIterator<Item = Cone>,
    {
        let mut index = HashMap::new();
        for (k, r) in rays.iter().enumerate() {
            if r.vector.len() != ambient {
                return Err(Error::Dimension(format!(
                    "ray {} has length {}, expected {ambient}",
                    r.label,
                    r.vector.len()
                )));
            }
            if r.vector.iter().all(Zero::is_zero) {
                return Err(Error::NotSimplicial);
            }
            if index.insert(r.label, k).is_some() {
                return Err(Error::LabelCollision(r.label));
            }
        }
        let mut cones = BTreeSet::new();
        cones.insert(Cone::origin());
        for g in generators {
            if g.rays().iter().any(|&r| r >= rays.len()) {
                return Err(Error::ConeAbsent);
            }
            if cones.contains(&g) {
                continue;
            }
            let vecs: Vec<Vector> = g.rays().iter().map(|&r| rays[r].vector.clone()).collect();
            if linalg::rank(&vecs) != g.dim() {
                return Err(Error::NotSimplicial);
            }
            for f in g.faces() {
                cones.insert(f);
            }
        }
        let dim = cones.iter().map(Cone::dim).max().unwrap_or(0);
        Ok(SimplicialFan {
            rays,
            cones,
            dim,
            ambient,
            index,
        })
    }

    /// Builds a fan whose cones are given as sets of ray labels.
    pub fn from_labeled(
        rays: Vec<Ray>,
        cones: &[Vec<VarId>],
        ambient: usize,
    ) -> Result<Self> {
        let index: HashMap<VarId, usize> =
            rays.iter().enumerate().map(|(k, r)| (r.label, k)).collect();
        let gens = cones
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| index.get(l).copied().ok_or(Error::ConeAbsent))
                    .collect::<Result<Vec<_>>>()
                    .map(Cone::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rays, gens, ambient)
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, k: usize) -> &Ray {
        &self.rays[k]
    }

    pub fn index_of(&self, label: VarId) -> Option<usize> {
        self.index.get(&label).copied()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn cones(&self) -> &BTreeSet<Cone> {
        &self.cones
    }

    pub fn contains(&self, c: &Cone) -> bool {
        self.cones.contains(c)
    }

    pub fn cones_of_dim(&self, k: usize) -> Vec<Cone> {
        self.cones.iter().filter(|c| c.dim() == k).cloned().collect()
    }

    /// Cones of the top dimension `d`.
    pub fn maximal_cones(&self) -> Vec<Cone> {
        self.cones_of_dim(self.dim)
    }

    /// True when every cone is a face of a `d`-dimensional cone.
    pub fn is_pure(&self) -> bool {
        let top = self.maximal_cones();
        self.cones.iter().all(|c| top.iter().any(|s| c.is_face_of(s)))
    }

    pub fn labels(&self, c: &Cone) -> Vec<VarId> {
        c.rays().iter().map(|&r| self.rays[r].label).collect()
    }

    pub fn cone_of(&self, labels: &[VarId]) -> Result<Cone> {
        let c = Cone::new(
            labels
                .iter()
                .map(|l| self.index_of(*l).ok_or(Error::ConeAbsent))
                .collect::<Result<Vec<_>>>()?,
        );
        if self.contains(&c) {
            Ok(c)
        } else {
            Err(Error::ConeAbsent)
        }
    }

    pub fn vectors(&self, c: &Cone) -> Vec<&Vector> {
        c.rays().iter().map(|&r| &self.rays[r].vector).collect()
    }

    /// A label not used by any ray: the first free singleton counting down
    /// from the largest label, else the first free pair.
    pub fn fresh_label(&self) -> VarId {
        use crate::set::{ElementSet, MAX_LABEL};
        (1..=MAX_LABEL)
            .rev()
            .map(|e| VarId(ElementSet::singleton(e)))
            .chain((1..=MAX_LABEL).rev().flat_map(|a| {
                (1..a).rev().map(move |b| VarId(ElementSet::singleton(a).with(b)))
            }))
            .find(|l| !self.index.contains_key(l))
            .expect("fans have fewer rays than labels")
    }

    /// Label-level description: ray vectors and cones as label sets. Two fans
    /// are equal iff their signatures agree.
    pub fn signature(&self) -> Signature {
        let rays = self.rays.iter().map(|r| (r.label, r.vector.clone())).collect();
        let cones = self
            .cones
            .iter()
            .map(|c| self.labels(c).into_iter().collect())
            .collect();
        (rays, cones)
    }

    /// Cones as label sets, forgetting the embedding.
    pub fn abstract_cones(&self) -> BTreeSet<BTreeSet<VarId>> {
        self.signature().1
    }

    /// Star subdivision at `cone`, adding a ray `new_label` generated by the
    /// sum of the cone's generators.
    pub fn star_subdivide(&self, cone: &Cone, new_label: VarId) -> Result<SimplicialFan> {
        if !self.contains(cone) {
            return Err(Error::ConeAbsent);
        }
        if cone.dim() < 2 {
            return Err(Error::ConeTooSmall(cone.dim()));
        }
        if self.index.contains_key(&new_label) {
            return Err(Error::LabelCollision(new_label));
        }
        let mut vector = vec![Rational::zero(); self.ambient];
        for v in self.vectors(cone) {
            for (a, b) in vector.iter_mut().zip(v) {
                *a += b;
            }
        }
        let mut rays = self.rays.clone();
        let r = rays.len();
        rays.push(Ray {
            label: new_label,
            vector,
        });
        let mut gens = Vec::new();
        for g in &self.cones {
            if cone.is_face_of(g) {
                continue;
            }
            if self.contains(&g.union(cone)) {
                gens.push(g.with(r));
            }
            gens.push(g.clone());
        }
        SimplicialFan::new(rays, gens, self.ambient)
    }

    /// Subfan of all faces of cones containing `cone`, in the ambient space.
    pub fn star(&self, cone: &Cone) -> Result<SimplicialFan> {
        if !self.contains(cone) {
            return Err(Error::ConeAbsent);
        }
        let members: Vec<Cone> = self
            .cones
            .iter()
            .filter(|g| self.contains(&g.union(cone)))
            .cloned()
            .collect();
        self.restrict(&members, |v| v.clone(), self.ambient)
    }

    /// Link of `cone`, with vectors mapped to `Q^ambient / span(cone)`
    /// through a basis of the functionals vanishing on the cone.
    pub fn link(&self, cone: &Cone) -> Result<SimplicialFan> {
        if !self.contains(cone) {
            return Err(Error::ConeAbsent);
        }
        let members: Vec<Cone> = self
            .cones
            .iter()
            .filter(|g| g.is_disjoint(cone) && self.contains(&g.union(cone)))
            .cloned()
            .collect();
        let funcs = linalg::annihilator(&self.vectors(cone), self.ambient);
        let dim = funcs.len();
        self.restrict(
            &members,
            |v| funcs.iter().map(|l| linalg::dot(l, v)).collect(),
            dim,
        )
    }

    fn restrict(
        &self,
        members: &[Cone],
        map: impl Fn(&Vector) -> Vector,
        ambient: usize,
    ) -> Result<SimplicialFan> {
        let used: BTreeSet<usize> = members.iter().flat_map(|c| c.rays().to_vec()).collect();
        let renumber: HashMap<usize, usize> =
            used.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let rays = used
            .iter()
            .map(|&r| Ray {
                label: self.rays[r].label,
                vector: map(&self.rays[r].vector),
            })
            .collect();
        let gens = members
            .iter()
            .map(|c| Cone::new(c.rays().iter().map(|r| renumber[r])));
        SimplicialFan::new(rays, gens, ambient)
    }

    /// Image under the linear map with the given rows. Fails if some cone
    /// stops being simplicial.
    pub fn project(&self, rows: &[Vector]) -> Result<SimplicialFan> {
        if rows.iter().any(|r| r.len() != self.ambient) {
            return Err(Error::Dimension("projection width".into()));
        }
        let rays = self
            .rays
            .iter()
            .map(|r| Ray {
                label: r.label,
                vector: rows.iter().map(|row| linalg::dot(row, &r.vector)).collect(),
            })
            .collect();
        SimplicialFan::new(rays, self.maximal_cones(), rows.len())
    }

    /// For each `(d-1)`-cone, its maximal cofaces and opposite rays.
    pub fn codim1_adjacency(&self) -> Vec<Adjacency> {
        if self.dim == 0 {
            return Vec::new();
        }
        let mut map: BTreeMap<Cone, Vec<(Cone, usize)>> = BTreeMap::new();
        for s in self.maximal_cones() {
            for &r in s.rays() {
                map.entry(s.without(r)).or_default().push((s.clone(), r));
            }
        }
        map.into_iter()
            .map(|(tau, cofaces)| Adjacency { tau, cofaces })
            .collect()
    }

    /// Checks `Σ w_σ v_σ ∈ span(τ)` at every codimension-one cone.
    pub fn check_balancing(&self, weight: &MinkowskiWeight) -> BalancingReport {
        let adj = self.codim1_adjacency();
        let violations: Vec<Cone> = adj
            .par_iter()
            .filter(|a| {
                let mut sum = vec![Rational::zero(); self.ambient];
                for (s, r) in &a.cofaces {
                    let w = weight.get(s);
                    for (x, v) in sum.iter_mut().zip(&self.rays[*r].vector) {
                        *x += &w * v;
                    }
                }
                !linalg::in_span(&self.vectors(&a.tau), &sum)
            })
            .map(|a| a.tau.clone())
            .collect();
        BalancingReport {
            checked: adj.len(),
            violations,
        }
    }

    /// A basis of the space of Minkowski weights of top degree.
    pub fn minkowski_weight_space(&self) -> Vec<MinkowskiWeight> {
        let top = self.maximal_cones();
        let col: HashMap<&Cone, usize> = top.iter().enumerate().map(|(k, c)| (c, k)).collect();
        let mut rows: Vec<Vector> = Vec::new();
        for a in self.codim1_adjacency() {
            for l in linalg::annihilator(&self.vectors(&a.tau), self.ambient) {
                let mut row = vec![Rational::zero(); top.len()];
                for (s, r) in &a.cofaces {
                    row[col[s]] = linalg::dot(&l, &self.rays[*r].vector);
                }
                rows.push(row);
            }
        }
        linalg::nullspace(&rows, top.len())
            .into_iter()
            .map(|v| MinkowskiWeight(top.iter().cloned().zip(v).collect()))
            .collect()
    }
}

/// Vector of `e_S` in `R^E / e_E`, realized by dropping the last element's
/// coordinate: `e_k` is the k-th basis vector for all but the largest label,
/// which maps to `-(e_1 + ... + e_n)`.
pub fn quotient_vector(ground: &[u32], set: Flat) -> Vector {
    let n = ground.len() - 1;
    let mut v = vec![Rational::zero(); n];
    for (k, &e) in ground.iter().enumerate() {
        if !set.contains(e) {
            continue;
        }
        if k < n {
            v[k] += Rational::one();
        } else {
            for x in v.iter_mut() {
                *x -= Rational::one();
            }
        }
    }
    v
}

/// The Bergman fan: one ray per nontrivial flat, one cone per chain.
pub fn bergman_fan(m: &Matroid) -> Result<SimplicialFan> {
    let lattice = m.lattice()?;
    let ground = m.elements();
    let rays: Vec<Ray> = lattice
        .nontrivial()
        .iter()
        .map(|&f| Ray {
            label: VarId(f),
            vector: quotient_vector(&ground, f),
        })
        .collect();
    let idx: HashMap<Flat, usize> = lattice
        .nontrivial()
        .iter()
        .enumerate()
        .map(|(k, &f)| (f, k))
        .collect();
    let cones = lattice
        .maximal_chains()
        .into_iter()
        .map(|c| Cone::new(c.flats().iter().map(|f| idx[f])));
    SimplicialFan::new(rays, cones, ground.len() - 1)
}

/// The fans `Δ_0 = Δ_M, Δ_1, ..., Δ_k` obtained by merging `F_l` with
/// `F_l ∪ i` for `l ≤ j`, with `S_i = {F_1 < ... < F_k}`. The merged class
/// keeps the label and vector of `F_l`.
pub fn deletion_tower(m: &Matroid, i: u32) -> Result<Vec<SimplicialFan>> {
    if m.len() < 2 {
        return Err(Error::DeleteLastElement);
    }
    let s = m.s_set(i)?;
    let lattice = m.lattice()?;
    let ground = m.elements();
    let chains = lattice.all_chains();
    let mut tower = Vec::with_capacity(s.len() + 1);
    for j in 0..=s.len() {
        let class: HashMap<Flat, Flat> = s[..j].iter().map(|&f| (f.with(i), f)).collect();
        let cls = |f: &Flat| *class.get(f).unwrap_or(f);
        let rays: Vec<Ray> = lattice
            .nontrivial()
            .iter()
            .filter(|f| !class.contains_key(f))
            .map(|&f| Ray {
                label: VarId(f),
                vector: quotient_vector(&ground, f),
            })
            .collect();
        let cones: Vec<Vec<VarId>> = chains
            .iter()
            .map(|c| {
                c.flats()
                    .iter()
                    .map(|f| VarId(cls(f)))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect()
            })
            .collect();
        tower.push(SimplicialFan::from_labeled(rays, &cones, ground.len() - 1)?);
    }
    Ok(tower)
}

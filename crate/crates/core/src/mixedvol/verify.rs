use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{brion_volume, deletion_volume, generic_vectors_with, Genericity, VolPolynomial};
use crate::error::{Error, Result};
use crate::fan::{bergman_fan, BalancingReport, Cone, MinkowskiWeight, SimplicialFan};
use crate::linalg::{self, Vector};
use crate::matroid::{Chain, Flat, Matroid};
use crate::poly::{int, DerivativeMonomial, Monomial, Rational, RationalPoly, VarId};

/// The degree map: applies a degree-`d` derivative monomial to `vol`.
pub fn degree_of(vol: &VolPolynomial, d: &DerivativeMonomial) -> Result<Rational> {
    if d.degree() != vol.degree {
        return Err(Error::WrongDegree {
            expected: vol.degree,
            found: d.degree(),
        });
    }
    Ok(vol.poly.pair_with(d))
}

/// The degree map on a homogeneous derivative polynomial.
pub fn degree_of_operator(vol: &VolPolynomial, op: &RationalPoly) -> Result<Rational> {
    if !op.is_zero() && !op.is_homogeneous(vol.degree) {
        return Err(Error::WrongDegree {
            expected: vol.degree,
            found: op.degree().unwrap_or(0),
        });
    }
    Ok(vol.poly.apply_operator(op).constant_term())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnihilatorReport {
    pub incomparable_checked: usize,
    /// Pairs of incomparable flats with `∂_F ∂_G Vol ≠ 0`.
    pub incomparable_failures: Vec<(Flat, Flat)>,
    pub linear_checked: usize,
    /// Pairs `(i, j)` with `L_ij Vol ≠ 0`.
    pub linear_failures: Vec<(u32, u32)>,
    pub chains_checked: usize,
    /// Maximal chains whose monomial does not have degree 1.
    pub chain_failures: Vec<Chain>,
}

impl AnnihilatorReport {
    pub fn passed(&self) -> bool {
        self.incomparable_failures.is_empty()
            && self.linear_failures.is_empty()
            && self.chain_failures.is_empty()
    }
}

/// Checks the relations that define the Chow ring against `vol`: products of
/// incomparable flats, the linear forms `Σ_F ([i∈F] - [j∈F]) ∂_F`, and the
/// normalization on maximal chains.
pub fn annihilator_check(m: &Matroid, vol: &RationalPoly) -> Result<AnnihilatorReport> {
    let lattice = m.lattice()?;
    let flats = lattice.nontrivial();
    let first: HashMap<Flat, RationalPoly> = flats
        .par_iter()
        .map(|f| (*f, vol.derivative(VarId(*f))))
        .collect();

    let pairs: Vec<(Flat, Flat)> = flats
        .iter()
        .enumerate()
        .flat_map(|(k, f)| flats[k + 1..].iter().map(move |g| (*f, *g)))
        .filter(|(f, g)| !f.is_subset(*g) && !g.is_subset(*f))
        .collect();
    let incomparable_failures = pairs
        .par_iter()
        .filter(|(f, g)| !first[f].derivative(VarId(*g)).is_zero())
        .copied()
        .collect();

    let elements = m.elements();
    let ordered: Vec<(u32, u32)> = elements
        .iter()
        .flat_map(|&i| elements.iter().filter(move |&&j| j != i).map(move |&j| (i, j)))
        .collect();
    let linear_failures = ordered
        .par_iter()
        .filter(|(i, j)| {
            let mut total = RationalPoly::zero();
            for f in flats {
                let c = i64::from(f.contains(*i)) - i64::from(f.contains(*j));
                if c != 0 {
                    total += first[f].scale(&int(c));
                }
            }
            !total.is_zero()
        })
        .copied()
        .collect();

    let chains = lattice.maximal_chains();
    let chain_failures = chains
        .par_iter()
        .filter(|c| {
            let d = DerivativeMonomial::product(c.flats().iter().map(|f| VarId(*f)));
            !vol.pair_with(&d).is_one()
        })
        .cloned()
        .collect();

    Ok(AnnihilatorReport {
        incomparable_checked: pairs.len(),
        incomparable_failures,
        linear_checked: ordered.len(),
        linear_failures,
        chains_checked: chains.len(),
        chain_failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowRankReport {
    pub p: usize,
    pub cones: usize,
    /// `dim CH^p` from the relation system.
    pub dim_chp: usize,
    pub pairing_rank: usize,
    pub dim_chd: usize,
}

impl ChowRankReport {
    pub fn passed(&self) -> bool {
        self.pairing_rank == self.dim_chp && self.dim_chd == 1
    }
}

/// `#p-cones - rank(Rel)`, with one relation row per `(p-1)`-cone `τ` and
/// functional `l` vanishing on `τ`, carrying `l(v)` at the coface `τ + v`.
fn chow_dimension(fan: &SimplicialFan, p: usize) -> usize {
    let cones = fan.cones_of_dim(p);
    if p == 0 {
        return cones.len();
    }
    let col: HashMap<&Cone, usize> = cones.iter().enumerate().map(|(k, c)| (c, k)).collect();
    let mut cofaces: BTreeMap<Cone, Vec<(usize, usize)>> = BTreeMap::new();
    for s in &cones {
        for &r in s.rays() {
            cofaces.entry(s.without(r)).or_default().push((col[s], r));
        }
    }
    let rows: Vec<Vector> = cofaces
        .par_iter()
        .flat_map_iter(|(tau, list)| {
            linalg::annihilator(&fan.vectors(tau), fan.ambient_dim())
                .into_iter()
                .map(|l| {
                    let mut row = vec![Rational::zero(); cones.len()];
                    for (k, r) in list {
                        row[*k] = linalg::dot(&l, &fan.ray(*r).vector);
                    }
                    row
                })
                .collect::<Vec<_>>()
        })
        .collect();
    cones.len() - linalg::rank(&rows)
}

/// Compares `dim CH^p` from the relations with the rank of the pairing
/// `CH^p × CH^{d-p} → Q` induced by `vol`.
pub fn chow_rank_checks(fan: &SimplicialFan, vol: &VolPolynomial, p: usize) -> Result<ChowRankReport> {
    let d = fan.dim();
    if vol.degree != d {
        return Err(Error::WrongDegree {
            expected: d,
            found: vol.degree,
        });
    }
    if p > d {
        return Err(Error::Dimension(format!("p = {p} exceeds d = {d}")));
    }
    let low = fan.cones_of_dim(p);
    let high = fan.cones_of_dim(d - p);
    let pairing: Vec<Vector> = low
        .par_iter()
        .map(|a| {
            high.iter()
                .map(|b| {
                    let mono = DerivativeMonomial::product(
                        fan.labels(a).into_iter().chain(fan.labels(b)),
                    );
                    vol.poly.pair_with(&mono)
                })
                .collect()
        })
        .collect();
    Ok(ChowRankReport {
        p,
        cones: low.len(),
        dim_chp: chow_dimension(fan, p),
        pairing_rank: linalg::rank(&pairing),
        dim_chd: chow_dimension(fan, d),
    })
}

/// [`chow_rank_checks`] for every `p` in `0..=d`.
pub fn chow_rank_checks_all(fan: &SimplicialFan, vol: &VolPolynomial) -> Result<Vec<ChowRankReport>> {
    (0..=fan.dim()).map(|p| chow_rank_checks(fan, vol, p)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub homogeneous: bool,
    /// Every variable is a nontrivial flat.
    pub variables: bool,
    pub annihilators: AnnihilatorReport,
    pub balancing: BalancingReport,
    /// Requested rank checks; left empty when the polynomial is malformed,
    /// which counts as a failure.
    pub rank_checks: Option<Vec<ChowRankReport>>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.homogeneous
            && self.variables
            && self.annihilators.passed()
            && self.balancing.passed()
            && self
                .rank_checks
                .as_ref()
                .is_none_or(|r| !r.is_empty() && r.iter().all(ChowRankReport::passed))
    }
}

/// The full invariant suite for a candidate `Vol_M`.
pub fn verify_volume(m: &Matroid, vol: &RationalPoly, rank_checks: bool) -> Result<VerificationReport> {
    let d = m.dim();
    let universe: Vec<VarId> = m.lattice()?.nontrivial().iter().map(|f| VarId(*f)).collect();
    let homogeneous = vol.is_homogeneous(d);
    let variables = vol.variables().iter().all(|v| universe.binary_search(v).is_ok());
    let annihilators = annihilator_check(m, vol)?;
    let fan = bergman_fan(m)?;
    let balancing = fan.check_balancing(&MinkowskiWeight::constant(&fan, Rational::one()));
    let rank_checks = if rank_checks && homogeneous && variables {
        let v = VolPolynomial {
            poly: vol.clone(),
            degree: d,
            universe: universe.into_iter().collect(),
            provenance: super::Provenance::new(super::Method::Input, None),
        };
        Some(chow_rank_checks_all(&fan, &v)?)
    } else if rank_checks {
        Some(Vec::new())
    } else {
        None
    };
    Ok(VerificationReport {
        homogeneous,
        variables,
        annihilators,
        balancing,
        rank_checks,
    })
}

/// Terms present in one polynomial but not identically in the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub left: String,
    pub right: String,
    pub only_left: RationalPoly,
    pub only_right: RationalPoly,
}

fn divergence(left: (&str, &RationalPoly), right: (&str, &RationalPoly)) -> Option<Divergence> {
    if left.1 == right.1 {
        return None;
    }
    let diff = |a: &RationalPoly, b: &RationalPoly| {
        RationalPoly::from_terms(
            a.terms()
                .filter(|(m, c)| b.coefficient(m) != **c)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    };
    Some(Divergence {
        left: left.0.to_string(),
        right: right.0.to_string(),
        only_left: diff(left.1, right.1),
        only_right: diff(right.1, left.1),
    })
}

#[derive(Clone, Debug)]
pub struct CrossReport {
    pub seeds: Vec<u64>,
    pub brion: Vec<VolPolynomial>,
    pub deletion: VolPolynomial,
    pub divergence: Option<Divergence>,
    pub verification: VerificationReport,
}

impl CrossReport {
    pub fn passed(&self) -> bool {
        self.divergence.is_none() && self.verification.passed()
    }
}

/// Brion under every seed against the deletion recursion, then the
/// invariant suite on the deletion result.
pub fn cross_validate(m: &Matroid, seeds: &[u64], policy: &Genericity) -> Result<CrossReport> {
    let deletion = deletion_volume(m)?;
    let brion = seeds
        .iter()
        .map(|&s| brion_volume(m, &generic_vectors_with(m, s, policy)?))
        .collect::<Result<Vec<_>>>()?;
    let divergence = brion.iter().zip(seeds).find_map(|(b, s)| {
        divergence((&format!("brion(seed={s})"), &b.poly), ("deletion", &deletion.poly))
    });
    let verification = verify_volume(m, &deletion.poly, false)?;
    Ok(CrossReport {
        seeds: seeds.to_vec(),
        brion,
        deletion,
        divergence,
        verification,
    })
}

/// Chain monomial as a plain monomial, for callers building derivatives.
pub fn chain_monomial(c: &Chain) -> Monomial {
    Monomial::product(c.flats().iter().map(|f| VarId(*f)))
}

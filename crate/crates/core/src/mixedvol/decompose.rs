use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use super::Genericity;
use crate::error::{Error, Result};
use crate::fan::{Cone, MinkowskiWeight, Ray, SimplicialFan};
use crate::linalg::Vector;
use crate::poly::{Rational, VarId};

/// One term `u^σ` of the decomposition, living on the boundary fan `Δ_σ`.
#[derive(Clone, Debug)]
pub struct Summand {
    pub cone: Cone,
    pub fan: SimplicialFan,
    pub weight: MinkowskiWeight,
}

fn boundary_fan(fan: &SimplicialFan, sigma: &Cone, v0: &Vector, label: VarId) -> Result<SimplicialFan> {
    let mut rays: Vec<Ray> = sigma.rays().iter().map(|&r| fan.ray(r).clone()).collect();
    let d = rays.len();
    rays.push(Ray {
        label,
        vector: v0.clone(),
    });
    let mut gens = vec![Cone::new(0..d)];
    gens.extend((0..d).map(|k| Cone::new((0..d).filter(|&t| t != k).chain([d]))));
    SimplicialFan::new(rays, gens, fan.ambient_dim())
}

fn solve(fan: &SimplicialFan, sigma: &Cone, w: &Rational, v0: &Vector, label: VarId) -> Result<Summand> {
    let (local, weight) = if fan.dim() == 0 {
        let local = SimplicialFan::new(Vec::new(), [Cone::origin()], fan.ambient_dim())?;
        let weight = MinkowskiWeight([(Cone::origin(), w.clone())].into());
        (local, weight)
    } else {
        let local = boundary_fan(fan, sigma, v0, label)?;
        let basis = local.minkowski_weight_space();
        if basis.len() != 1 {
            return Err(Error::Verification(format!(
                "boundary fan has a {}-dimensional weight space",
                basis.len()
            )));
        }
        let own = Cone::new(0..fan.dim());
        let base = basis[0].get(&own);
        if base.is_zero() {
            return Err(Error::Verification("boundary weight vanishes on σ".into()));
        }
        let factor = w / base;
        let weight = MinkowskiWeight(basis[0].0.iter().map(|(c, x)| (c.clone(), x * &factor)).collect());
        (local, weight)
    };
    Ok(Summand {
        cone: sigma.clone(),
        fan: local,
        weight,
    })
}

/// Splits a Minkowski weight on a pure `d`-fan in `Q^d` into weights on the
/// boundary fans `Δ_σ = σ ∪ {τ + v0}`, and checks `Σ u^σ = w`.
pub fn decompose_weight(fan: &SimplicialFan, weight: &MinkowskiWeight, v0: &Vector) -> Result<Vec<Summand>> {
    if fan.ambient_dim() != fan.dim() || v0.len() != fan.dim() {
        return Err(Error::Dimension("decomposition needs a d-fan in Q^d".into()));
    }
    if weight.0.keys().any(|c| c.dim() != fan.dim() || !fan.contains(c)) {
        return Err(Error::WeightShape);
    }
    let report = fan.check_balancing(weight);
    if !report.passed() {
        return Err(Error::Unbalanced(report.violations.len()));
    }
    let label = fan.fresh_label();
    let summands = fan
        .maximal_cones()
        .par_iter()
        .map(|s| solve(fan, s, &weight.get(s), v0, label))
        .collect::<Result<Vec<_>>>()?;

    let mut total: BTreeMap<BTreeSet<VarId>, Rational> = BTreeMap::new();
    for s in &summands {
        for (c, x) in &s.weight.0 {
            *total.entry(s.fan.labels(c).into_iter().collect()).or_insert_with(Rational::zero) += x;
        }
    }
    for s in fan.maximal_cones() {
        let key: BTreeSet<VarId> = fan.labels(&s).into_iter().collect();
        let got = total.remove(&key).unwrap_or_else(Rational::zero);
        if got != weight.get(&s) {
            return Err(Error::Verification(format!("Σ u^σ differs from w at {s:?}")));
        }
    }
    if total.values().any(|x| !x.is_zero()) {
        return Err(Error::Verification("Σ u^σ is nonzero on a cone through v0".into()));
    }
    Ok(summands)
}

/// As [`decompose_weight`], sampling `v0` until every `τ + v0` is simplicial.
pub fn decompose_weight_seeded(
    fan: &SimplicialFan,
    weight: &MinkowskiWeight,
    seed: u64,
    policy: &Genericity,
) -> Result<(Vector, Vec<Summand>)> {
    let d = fan.dim();
    policy
        .search(seed, |sampler, _| {
            let v0 = sampler.vector(d);
            match decompose_weight(fan, weight, &v0) {
                Err(Error::NotSimplicial) => None,
                other => Some(other.map(|s| (v0, s))),
            }
        })?
}

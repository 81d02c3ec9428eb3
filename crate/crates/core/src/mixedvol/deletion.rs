use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::{subdivision_operator, Method, Provenance, VolPolynomial};
use crate::error::{Error, Result};
use crate::matroid::{Flat, Matroid};
use crate::poly::{int, LinearForm, Rational, RationalPoly, VarId};
use crate::set::ElementSet;

/// Coefficients of the relation `∂_i = Σ b_Ḡ ∂_Ḡ` (non-coloop) or
/// `∂_i - ∂_{E∖i} = Σ b_Ḡ ∂_Ḡ` (coloop) coming from `t_i - t_j`, keyed by the
/// closure `Ḡ` in `M` of each nontrivial flat `G` of `M ∖ i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BCoefficients {
    pub i: u32,
    pub j: u32,
    pub values: BTreeMap<Flat, Rational>,
}

impl BCoefficients {
    pub fn get(&self, g_bar: Flat) -> Rational {
        self.values.get(&g_bar).cloned().unwrap_or_else(Rational::zero)
    }
}

fn check_pivot(m: &Matroid, i: u32) -> Result<()> {
    if !m.ground().contains(i) {
        return Err(Error::NotInGroundSet(i));
    }
    if m.len() < 2 {
        return Err(Error::DeleteLastElement);
    }
    if !m.is_flat(ElementSet::singleton(i)) {
        return Err(Error::NotAFlat(i));
    }
    Ok(())
}

/// `b_Ḡ = [j ∈ Ḡ] - [i ∈ Ḡ]` with `j = min(E ∖ i)`.
pub fn b_coefficients(m: &Matroid, i: u32) -> Result<BCoefficients> {
    check_pivot(m, i)?;
    let j = m.ground().without(i).min().expect("two elements");
    b_coefficients_with(m, i, j)
}

/// `b_Ḡ = [j ∈ Ḡ] - [i ∈ Ḡ]` for a chosen `j ≠ i`.
pub fn b_coefficients_with(m: &Matroid, i: u32, j: u32) -> Result<BCoefficients> {
    check_pivot(m, i)?;
    if j == i || !m.ground().contains(j) {
        return Err(Error::NotInGroundSet(j));
    }
    let values = m
        .closure_map(i)?
        .into_values()
        .map(|g| {
            let b = i64::from(g.contains(j)) - i64::from(g.contains(i));
            (g, int(b))
        })
        .collect();
    Ok(BCoefficients { i, j, values })
}

/// Everything one deletion step needs about `M` and `M ∖ i`.
#[derive(Clone, Debug)]
pub struct DeletionStep {
    pub i: u32,
    pub minor: Matroid,
    /// Nontrivial flats `G` of `M ∖ i` mapped to their closures `Ḡ` in `M`.
    pub closure: BTreeMap<Flat, Flat>,
    pub b: BCoefficients,
    pub coloop: bool,
    pub complement: Flat,
    /// `S_i`, ordered by (cardinality, lex).
    pub s_set: Vec<Flat>,
}

impl DeletionStep {
    pub fn new(m: &Matroid, i: u32, j: Option<u32>) -> Result<Self> {
        let b = match j {
            Some(j) => b_coefficients_with(m, i, j)?,
            None => b_coefficients(m, i)?,
        };
        Ok(DeletionStep {
            i,
            minor: m.delete(i)?,
            closure: m.closure_map(i)?,
            b,
            coloop: m.is_coloop(i)?,
            complement: m.ground().without(i),
            s_set: m.s_set(i)?,
        })
    }

    fn xi(&self) -> VarId {
        VarId(ElementSet::singleton(self.i))
    }

    fn renaming(&self) -> BTreeMap<VarId, VarId> {
        self.closure.iter().map(|(g, gb)| (VarId(*g), VarId(*gb))).collect()
    }

    /// `x_G ↦ x_Ḡ + t·b_Ḡ·x_v`.
    fn shift_map(&self, v: VarId, t: i64) -> BTreeMap<VarId, LinearForm> {
        self.closure
            .iter()
            .map(|(g, gb)| {
                let mut form = vec![(VarId(*gb), Rational::one())];
                let b = self.b.get(*gb) * int(t);
                if !b.is_zero() {
                    form.push((v, b));
                }
                (VarId(*g), form)
            })
            .collect()
    }

    /// `Σ b_Ḡ ∂_Ḡ p`.
    fn b_derivative(&self, p: &RationalPoly) -> RationalPoly {
        self.b
            .values
            .iter()
            .filter(|(_, b)| !b.is_zero())
            .map(|(g, b)| p.derivative(VarId(*g)).scale(b))
            .sum()
    }

    fn lifted_universe(&self) -> BTreeSet<VarId> {
        let mut u: BTreeSet<VarId> = self.closure.values().map(|g| VarId(*g)).collect();
        u.insert(self.xi());
        if self.coloop {
            u.insert(VarId(self.complement));
        }
        u
    }
}

fn ensure(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::LiftInvariant(what.to_string()))
    }
}

/// `Vol_{Δ_k} = Vol_{M∖i}(x_Ḡ + b_Ḡ x_i)` for a non-coloop `i`.
pub fn lift_non_coloop(vol: &VolPolynomial, step: &DeletionStep) -> Result<VolPolynomial> {
    if step.coloop {
        return Err(Error::IsColoop(step.i));
    }
    let xi = step.xi();
    let poly = vol.poly.linear_substitute(&step.shift_map(xi, 1))?;
    ensure(
        (&poly.derivative(xi) - &step.b_derivative(&poly)).is_zero(),
        "non-coloop relation does not annihilate the lift",
    )?;
    ensure(
        poly.set_zero(xi) == vol.poly.rename(&step.renaming()),
        "lift does not restrict to the minor at x_i = 0",
    )?;
    VolPolynomial::new(poly, vol.degree, step.lifted_universe(), Provenance::new(Method::Lift, None))
}

/// `Vol_{Δ_k} = ∫ V(x_Ḡ + b x_i) dx_i + ∫ V(x_Ḡ - b x_{E∖i}) dx_{E∖i}` for a
/// coloop `i`.
pub fn lift_coloop(vol: &VolPolynomial, step: &DeletionStep) -> Result<VolPolynomial> {
    if !step.coloop {
        return Err(Error::NotColoop(step.i));
    }
    let xi = step.xi();
    let xc = VarId(step.complement);
    let v1 = vol.poly.linear_substitute(&step.shift_map(xi, 1))?;
    let v2 = vol.poly.linear_substitute(&step.shift_map(xc, -1))?;
    let poly = &v1.antiderivative(xi) + &v2.antiderivative(xc);

    let relation = &(&poly.derivative(xi) - &poly.derivative(xc)) - &step.b_derivative(&poly);
    ensure(relation.is_zero(), "coloop relation does not annihilate the lift")?;
    ensure(
        poly.derivative(xi).derivative(xc).is_zero(),
        "∂_i ∂_(E∖i) does not annihilate the lift",
    )?;
    let renamed = vol.poly.rename(&step.renaming());
    let linear = &(&RationalPoly::var(xi) + &RationalPoly::var(xc)) * &renamed;
    ensure(
        poly.part_of_degree_in(&[xi, xc], 1) == linear,
        "linear part is not (x_i + x_(E∖i)) times the minor",
    )?;
    VolPolynomial::new(
        poly,
        vol.degree + 1,
        step.lifted_universe(),
        Provenance::new(Method::Lift, None),
    )
}

/// Intermediate volumes of one deletion step.
#[derive(Clone, Debug)]
pub struct DeletionTrace {
    pub i: u32,
    /// True when `{i}` is not a flat and the step is a renaming.
    pub renamed_only: bool,
    pub coloop: bool,
    pub b: Option<BCoefficients>,
    pub s_set: Vec<Flat>,
    pub minor: VolPolynomial,
    /// `tower[j] = Vol_{Δ_j}`; `tower[0]` is the result and `tower[k]` the
    /// lifted polynomial. A renaming step holds only the result.
    pub tower: Vec<VolPolynomial>,
}

fn nontrivial_universe(m: &Matroid) -> Result<BTreeSet<VarId>> {
    Ok(m.lattice()?.nontrivial().iter().map(|f| VarId(*f)).collect())
}

fn point_volume() -> VolPolynomial {
    VolPolynomial {
        poly: RationalPoly::one(),
        degree: 0,
        universe: BTreeSet::new(),
        provenance: Provenance::new(Method::Deletion, None),
    }
}

fn step(m: &Matroid, i: u32, j: Option<u32>, minor_vol: VolPolynomial) -> Result<DeletionTrace> {
    if !m.is_flat(ElementSet::singleton(i)) {
        let closure = m.closure_map(i)?;
        let map: BTreeMap<VarId, VarId> =
            closure.iter().map(|(g, gb)| (VarId(*g), VarId(*gb))).collect();
        let poly = minor_vol.poly.rename(&map);
        let vol = VolPolynomial::new(
            poly,
            minor_vol.degree,
            nontrivial_universe(m)?,
            Provenance::new(Method::Deletion, None),
        )?;
        return Ok(DeletionTrace {
            i,
            renamed_only: true,
            coloop: false,
            b: None,
            s_set: Vec::new(),
            minor: minor_vol,
            tower: vec![vol],
        });
    }
    let st = DeletionStep::new(m, i, j)?;
    let mut vol = if st.coloop {
        lift_coloop(&minor_vol, &st)?
    } else {
        lift_non_coloop(&minor_vol, &st)?
    };
    let xi = st.xi();
    let mut tower = vec![vol.clone()];
    for f in st.s_set.iter().rev() {
        vol = subdivision_operator(&vol, xi, VarId(*f), VarId(f.with(i)))?;
        tower.push(vol.clone());
    }
    tower.reverse();
    Ok(DeletionTrace {
        i,
        renamed_only: false,
        coloop: st.coloop,
        b: Some(st.b),
        s_set: st.s_set,
        minor: minor_vol,
        tower,
    })
}

fn finish(m: &Matroid, trace: &DeletionTrace) -> Result<VolPolynomial> {
    let universe = nontrivial_universe(m)?;
    let vol = trace.tower[0].clone();
    if vol.universe != universe {
        return Err(Error::VariableUniverse(format!(
            "deletion of {} produced {} ray labels, expected {}",
            trace.i,
            vol.universe.len(),
            universe.len()
        )));
    }
    if m.dim() > 0 && vol.poly.variables() != universe {
        return Err(Error::VariableUniverse(format!(
            "deletion of {} does not use every nontrivial flat",
            trace.i
        )));
    }
    Ok(vol.with_provenance(Provenance::new(Method::Deletion, None)))
}

/// Mixed volume by recursive deletion of the largest element.
pub fn deletion_volume(m: &Matroid) -> Result<VolPolynomial> {
    if m.len() == 1 {
        return Ok(point_volume());
    }
    let i = m.ground().max().expect("nonempty");
    let minor = deletion_volume(&m.delete(i)?)?;
    let trace = step(m, i, None, minor)?;
    finish(m, &trace)
}

/// One deletion step with an explicit pivot `i` and optional `j`, keeping
/// the intermediate volumes. The minor is computed with the default
/// recursion.
pub fn deletion_volume_traced(
    m: &Matroid,
    i: u32,
    j: Option<u32>,
) -> Result<(VolPolynomial, DeletionTrace)> {
    if !m.ground().contains(i) {
        return Err(Error::NotInGroundSet(i));
    }
    if m.len() < 2 {
        return Err(Error::DeleteLastElement);
    }
    let minor = deletion_volume(&m.delete(i)?)?;
    let trace = step(m, i, j, minor)?;
    let vol = finish(m, &trace)?;
    Ok((vol, trace))
}

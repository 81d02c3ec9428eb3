use num_traits::One;

use super::{Method, Provenance, VolPolynomial};
use crate::error::{Error, Result};
use crate::poly::{factorial, linear_power, DerivativeMonomial, Rational, RationalPoly, VarId};

/// All exponent vectors of length `j` with entries `≥ 1` summing to `m`.
fn compositions(m: u32, j: usize) -> Vec<Vec<u32>> {
    fn go(left: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 1..=left - (slots as u32 - 1) {
            prefix.push(a);
            go(left - a, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if j > 0 && m >= j as u32 {
        go(m, j, &mut Vec::with_capacity(j), &mut out);
    }
    out
}

/// Volume after star subdivision at the 2-cone `{p, q}` with new ray `r`.
pub fn subdivision_operator(vol: &VolPolynomial, p: VarId, q: VarId, r: VarId) -> Result<VolPolynomial> {
    subdivision_operator_general(vol, &[p, q], r)
}

/// Volume after star subdivision at the cone spanned by `rays`:
/// `vol - (-1)^j Σ_{m=j}^{d} z^m/m! Σ_{α ≥ 1, |α| = m} ∂^α vol` with
/// `z = x_r - Σ x_p` substituted after differentiating.
pub fn subdivision_operator_general(
    vol: &VolPolynomial,
    rays: &[VarId],
    r: VarId,
) -> Result<VolPolynomial> {
    let j = rays.len();
    if j < 2 {
        return Err(Error::ConeTooSmall(j));
    }
    if vol.universe.contains(&r) || rays.contains(&r) {
        return Err(Error::LabelCollision(r));
    }
    let d = vol.degree as u32;
    let mut z: Vec<(VarId, Rational)> = vec![(r, Rational::one())];
    z.extend(rays.iter().map(|&p| (p, -Rational::one())));
    let mut correction = RationalPoly::zero();
    for m in j as u32..=d {
        let mut inner = RationalPoly::zero();
        for alpha in compositions(m, j) {
            let op = DerivativeMonomial::of(rays.iter().copied().zip(alpha));
            inner += vol.poly.partial_derivative(&op);
        }
        if inner.is_zero() {
            continue;
        }
        correction += &linear_power(&z, m) * &inner.scale(&factorial(m as usize).recip());
    }
    let poly = if j.is_multiple_of(2) {
        &vol.poly - &correction
    } else {
        &vol.poly + &correction
    };
    let mut universe = vol.universe.clone();
    universe.insert(r);
    VolPolynomial::new(poly, vol.degree, universe, Provenance::new(Method::Operator, vol.provenance.seed))
}

use num_traits::Zero;
use rayon::prelude::*;

use super::{Genericity, Method, Provenance, VolPolynomial};
use crate::error::{Error, Result};
use crate::fan::{Cone, MinkowskiWeight, SimplicialFan};
use crate::linalg::{self, Vector};
use crate::poly::{factorial, linear_power, Rational, RationalPoly, VarId};

/// The matrix `[v_0, v_1, ..., v_d]` of a maximal cone and its signed
/// minors `X_i = (-1)^i det(matrix without column i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationData {
    pub cone: Cone,
    pub columns: Vec<Vector>,
    pub minors: Vec<Rational>,
}

impl EvaluationData {
    pub fn new(fan: &SimplicialFan, cone: &Cone, v0: &Vector) -> Self {
        let mut columns = vec![v0.clone()];
        columns.extend(fan.vectors(cone).into_iter().cloned());
        let minors = (0..columns.len())
            .map(|i| {
                let rest: Vec<&Vector> = columns
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i)
                    .map(|(_, c)| c)
                    .collect();
                let det = linalg::det_columns(&rest);
                if i % 2 == 0 {
                    det
                } else {
                    -det
                }
            })
            .collect();
        EvaluationData {
            cone: cone.clone(),
            columns,
            minors,
        }
    }

    pub fn is_generic(&self) -> bool {
        self.minors.iter().skip(1).all(|x| !x.is_zero())
    }

    /// `(Σ X_i x_i)^d / (d! X_1 ⋯ X_d)`.
    pub fn contribution(&self, fan: &SimplicialFan) -> RationalPoly {
        let d = self.cone.dim();
        let form: Vec<(VarId, Rational)> = self
            .cone
            .rays()
            .iter()
            .zip(&self.minors[1..])
            .map(|(&r, x)| (fan.ray(r).label, x.clone()))
            .collect();
        let denom = self.minors[1..].iter().fold(factorial(d), |acc, x| acc * x);
        linear_power(&form, d as u32).scale(&denom.recip())
    }
}

fn check_shape(fan: &SimplicialFan, weight: &MinkowskiWeight) -> Result<()> {
    if fan.ambient_dim() != fan.dim() {
        return Err(Error::Dimension(format!(
            "fan of dimension {} lives in Q^{}",
            fan.dim(),
            fan.ambient_dim()
        )));
    }
    if weight.0.keys().any(|c| c.dim() != fan.dim() || !fan.contains(c)) {
        return Err(Error::WeightShape);
    }
    let report = fan.check_balancing(weight);
    if !report.passed() {
        return Err(Error::Unbalanced(report.violations.len()));
    }
    Ok(())
}

fn evaluate_unchecked(
    fan: &SimplicialFan,
    weight: &MinkowskiWeight,
    v0: &Vector,
) -> Result<RationalPoly> {
    let d = fan.dim();
    fan.maximal_cones()
        .par_iter()
        .map(|s| {
            let w = weight.get(s);
            if w.is_zero() {
                return Ok(RationalPoly::zero());
            }
            let data = EvaluationData::new(fan, s, v0);
            if !data.is_generic() {
                return Err(Error::StaleCertificate);
            }
            Ok(data.contribution(fan).scale(&w))
        })
        .try_reduce(RationalPoly::zero, |a, b| Ok(a + b))
        .and_then(|p| {
            if p.is_homogeneous(d) {
                Ok(p)
            } else {
                Err(Error::WrongDegree {
                    expected: d,
                    found: p.degree().unwrap_or(0),
                })
            }
        })
}

fn universe(fan: &SimplicialFan) -> std::collections::BTreeSet<VarId> {
    fan.rays().iter().map(|r| r.label).collect()
}

/// Mixed volume of a balanced weight on a pure `d`-fan in `Q^d`, evaluated at
/// `v0`. Fails with `StaleCertificate` if some `X_i` vanishes.
pub fn evaluation_volume_fan(
    fan: &SimplicialFan,
    weight: &MinkowskiWeight,
    v0: &Vector,
) -> Result<VolPolynomial> {
    check_shape(fan, weight)?;
    if v0.len() != fan.dim() {
        return Err(Error::Dimension("v0 has the wrong length".into()));
    }
    let poly = evaluate_unchecked(fan, weight, v0)?;
    VolPolynomial::new(
        poly,
        fan.dim(),
        universe(fan),
        Provenance::new(Method::Evaluation, None),
    )
}

/// As [`evaluation_volume_fan`], sampling `v0` until it is generic.
pub fn evaluation_volume_seeded(
    fan: &SimplicialFan,
    weight: &MinkowskiWeight,
    seed: u64,
    policy: &Genericity,
) -> Result<VolPolynomial> {
    check_shape(fan, weight)?;
    let d = fan.dim();
    let poly = policy
        .search(seed, |sampler, _| {
            let v0 = sampler.vector(d);
            match evaluate_unchecked(fan, weight, &v0) {
                Err(Error::StaleCertificate) => None,
                other => Some(other),
            }
        })??;
    VolPolynomial::new(poly, d, universe(fan), Provenance::new(Method::Evaluation, Some(seed)))
}

/// A random integer map `Q^ambient → Q^d` keeping every cone simplicial,
/// with the projected fan.
pub fn random_projection(
    fan: &SimplicialFan,
    seed: u64,
    policy: &Genericity,
) -> Result<(Vec<Vector>, SimplicialFan)> {
    let d = fan.dim();
    let m = fan.ambient_dim();
    policy
        .search(seed, |sampler, _| {
            let rows: Vec<Vector> = (0..d).map(|_| sampler.vector(m)).collect();
            match fan.project(&rows) {
                Ok(p) => Some(Ok((rows, p))),
                Err(Error::NotSimplicial) => None,
                Err(e) => Some(Err(e)),
            }
        })?
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{bergman_fan, Ray};
    use crate::matroid::Matroid;
    use crate::mixedvol::{brion_volume, generic_vectors};
    use crate::poly::{int, q};

    fn line() -> SimplicialFan {
        let rays = vec![
            Ray { label: VarId::of(&[1]), vector: vec![int(1)] },
            Ray { label: VarId::of(&[2]), vector: vec![int(-1)] },
        ];
        SimplicialFan::new(rays, [Cone::new([0]), Cone::new([1])], 1).unwrap()
    }

    #[test]
    fn complete_line() {
        let fan = line();
        let w = MinkowskiWeight::constant(&fan, int(1));
        let vol = evaluation_volume_fan(&fan, &w, &vec![int(1)]).unwrap();
        let expect = RationalPoly::var(VarId::of(&[1])) + RationalPoly::var(VarId::of(&[2]));
        assert_eq!(vol.poly, expect);
        for c in fan.maximal_cones() {
            let data = EvaluationData::new(&fan, &c, &vec![int(1)]);
            assert_eq!(data.minors[1], int(-1));
        }
        let zero = MinkowskiWeight::constant(&fan, int(0));
        assert!(evaluation_volume_fan(&fan, &zero, &vec![q(3, 2)]).unwrap().poly.is_zero());
        let mut lopsided = w.clone();
        lopsided.0.insert(Cone::new([0]), int(2));
        assert!(matches!(evaluation_volume_fan(&fan, &lopsided, &vec![int(1)]), Err(Error::Unbalanced(1))));
        assert!(matches!(evaluation_volume_fan(&fan, &w, &vec![int(0)]), Err(Error::StaleCertificate)));
    }

    #[test]
    fn projected_bergman_fan_matches_brion() {
        let m = Matroid::from_bases(&[1, 2, 3, 4], &[vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).unwrap();
        let gv = generic_vectors(&m, 11).unwrap();
        let fan = bergman_fan(&m).unwrap().project(&gv.projection().unwrap()).unwrap();
        let w = MinkowskiWeight::constant(&fan, int(1));
        let e2 = vec![int(0), int(1)];
        let eval = evaluation_volume_fan(&fan, &w, &e2).unwrap();
        assert_eq!(eval, brion_volume(&m, &gv).unwrap());
        let seeded = evaluation_volume_seeded(&fan, &w, 5, &Genericity::default()).unwrap();
        assert_eq!(seeded, eval);
        let (_, other) = random_projection(&bergman_fan(&m).unwrap(), 9, &Genericity::default()).unwrap();
        let again = evaluation_volume_seeded(&other, &MinkowskiWeight::constant(&other, int(1)), 2, &Genericity::default()).unwrap();
        assert_eq!(again, eval);
    }
}

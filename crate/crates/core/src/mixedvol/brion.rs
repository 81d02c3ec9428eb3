use num_traits::Zero;
use rayon::prelude::*;

use super::{Genericity, Method, Provenance, VolPolynomial};
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::matroid::{Chain, Flat, Matroid};
use crate::poly::{factorial, linear_power, LinearForm, Rational, RationalPoly, VarId};

/// Vectors `v_e ∈ Q^{d-1}` summing to zero, one per element, certified to
/// give nonzero coefficients on every maximal chain.
///
/// Sampled vectors also carry a `lift` row used to extend the map
/// `e_k ↦ v_k` to a projection of the Bergman fan into `Q^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericVectors {
    pub seed: Option<u64>,
    pub bound: i64,
    pub attempts: usize,
    ground: Vec<u32>,
    vectors: Vec<Vector>,
    lift: Option<Vec<Rational>>,
    dim: usize,
}

impl GenericVectors {
    /// Hand-picked vectors, one per element in label order. Fails unless they
    /// sum to zero and pass the certificate.
    pub fn from_vectors(m: &Matroid, vectors: Vec<Vector>) -> Result<Self> {
        let d = m.dim();
        if vectors.len() != m.len() || vectors.iter().any(|v| v.len() + 1 != d.max(1)) {
            return Err(Error::Dimension(format!(
                "expected {} vectors in Q^{}",
                m.len(),
                d.saturating_sub(1)
            )));
        }
        if d > 0 && !sum(&vectors, d - 1).iter().all(Zero::is_zero) {
            return Err(Error::Dimension("vectors do not sum to zero".into()));
        }
        let gv = GenericVectors {
            seed: None,
            bound: 0,
            attempts: 0,
            ground: m.elements(),
            vectors,
            lift: None,
            dim: d,
        };
        if gv.certify(m)? {
            Ok(gv)
        } else {
            Err(Error::StaleCertificate)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ground(&self) -> &[u32] {
        &self.ground
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// `v_F = Σ_{e ∈ F} v_e`.
    pub fn vector_of(&self, set: Flat) -> Vector {
        let len = self.dim.saturating_sub(1);
        let mut out = vec![Rational::zero(); len];
        for (k, e) in self.ground.iter().enumerate() {
            if set.contains(*e) {
                for (a, b) in out.iter_mut().zip(&self.vectors[k]) {
                    *a += b;
                }
            }
        }
        out
    }

    fn lift_of(&self, set: Flat) -> Option<Rational> {
        let lift = self.lift.as_ref()?;
        Some(
            self.ground
                .iter()
                .zip(lift)
                .filter(|(e, _)| set.contains(**e))
                .map(|(_, h)| h.clone())
                .sum(),
        )
    }

    /// Rows of the map `Q^n → Q^d` sending the `k`-th coordinate vector to
    /// `(v_k, h_k)`. With `v_0 = (0, ..., 0, 1)` the evaluation formula on the
    /// projected fan reproduces the Brion sum. `None` for hand-picked vectors.
    pub fn projection(&self) -> Option<Vec<Vector>> {
        let lift = self.lift.as_ref()?;
        let n = self.ground.len() - 1;
        let mut rows: Vec<Vector> = (0..self.dim.saturating_sub(1))
            .map(|r| (0..n).map(|k| self.vectors[k][r].clone()).collect())
            .collect();
        if self.dim > 0 {
            rows.push(lift[..n].to_vec());
        }
        Some(rows)
    }

    /// True when every maximal chain has all coefficients nonzero, and, when a
    /// lift is present, every chain stays independent after projection.
    fn certify(&self, m: &Matroid) -> Result<bool> {
        let chains = m.maximal_chains()?;
        Ok(chains.par_iter().all(|c| {
            let cm = chain_matrix(self, c);
            if cm.coefficients.iter().any(Zero::is_zero) {
                return false;
            }
            match &self.lift {
                None => true,
                Some(_) if c.is_empty() => true,
                Some(_) => {
                    let s: Rational = cm
                        .coefficients
                        .iter()
                        .zip(c.flats())
                        .map(|(a, f)| a * self.lift_of(*f).expect("lift"))
                        .sum();
                    !s.is_zero()
                }
            }
        }))
    }
}

fn sum(vectors: &[Vector], len: usize) -> Vector {
    let mut out = vec![Rational::zero(); len];
    for v in vectors {
        for (a, b) in out.iter_mut().zip(v) {
            *a += b;
        }
    }
    out
}

/// Per-chain data of the Brion sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMatrix {
    pub chain: Chain,
    /// Columns `v_{F_1}, ..., v_{F_d}` of the `(d-1) × d` matrix.
    pub columns: Vec<Vector>,
    /// `a_t`: the signed minor omitting column `t`, so that the determinant
    /// of the matrix with the variable row on top is `Σ a_t x_{F_t}`.
    pub coefficients: Vec<Rational>,
    /// `c = d! a_1 ⋯ a_d`.
    pub scale: Rational,
}

impl ChainMatrix {
    pub fn form(&self) -> LinearForm {
        self.chain
            .flats()
            .iter()
            .zip(&self.coefficients)
            .map(|(f, a)| (VarId(*f), a.clone()))
            .collect()
    }

    /// `(Σ a_t x_{F_t})^d / c`.
    pub fn contribution(&self) -> RationalPoly {
        let d = self.chain.len() as u32;
        linear_power(&self.form(), d).scale(&self.scale.recip())
    }
}

pub fn chain_matrix(gv: &GenericVectors, chain: &Chain) -> ChainMatrix {
    let d = chain.len();
    let columns: Vec<Vector> = chain.flats().iter().map(|f| gv.vector_of(*f)).collect();
    let coefficients: Vec<Rational> = (0..d)
        .map(|t| {
            let rest: Vec<&Vector> = columns
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != t)
                .map(|(_, c)| c)
                .collect();
            let minor = linalg::det_columns(&rest);
            if t % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect();
    let scale = coefficients.iter().fold(factorial(d), |acc, a| acc * a);
    ChainMatrix {
        chain: chain.clone(),
        columns,
        coefficients,
        scale,
    }
}

pub fn generic_vectors(m: &Matroid, seed: u64) -> Result<GenericVectors> {
    generic_vectors_with(m, seed, &Genericity::default())
}

/// Samples integer vectors for elements `1..n`, sets `v_{n+1} = -Σ v_k`, and
/// resamples with a larger bound until the certificate holds.
pub fn generic_vectors_with(m: &Matroid, seed: u64, policy: &Genericity) -> Result<GenericVectors> {
    let d = m.dim();
    let ground = m.elements();
    let n = ground.len() - 1;
    let len = d.saturating_sub(1);
    policy.search(seed, |sampler, attempt| {
        let mut vectors: Vec<Vector> = (0..n).map(|_| sampler.vector(len)).collect();
        let last = sum(&vectors, len).into_iter().map(|x| -x).collect();
        vectors.push(last);
        let mut lift = sampler.vector(n);
        lift.push(-lift.iter().cloned().sum::<Rational>());
        let gv = GenericVectors {
            seed: Some(seed),
            bound: sampler.bound,
            attempts: attempt + 1,
            ground: ground.clone(),
            vectors,
            lift: Some(lift),
            dim: d,
        };
        match gv.certify(m) {
            Ok(true) => Some(gv),
            _ => None,
        }
    })
}

/// `Vol_M = Σ_σ (det Â_σ)^d / c_σ` over maximal chains.
pub fn brion_volume(m: &Matroid, gv: &GenericVectors) -> Result<VolPolynomial> {
    if gv.ground != m.elements() || gv.dim != m.dim() {
        return Err(Error::Dimension("vectors were chosen for another matroid".into()));
    }
    let lattice = m.lattice()?;
    let chains = lattice.maximal_chains();
    let poly = chains
        .par_iter()
        .map(|c| {
            let cm = chain_matrix(gv, c);
            if cm.coefficients.iter().any(Zero::is_zero) {
                return Err(Error::StaleCertificate);
            }
            Ok(cm.contribution())
        })
        .try_reduce(RationalPoly::zero, |a, b| Ok(a + b))?;
    VolPolynomial::new(
        poly,
        m.dim(),
        lattice.nontrivial().iter().map(|f| VarId(*f)).collect(),
        Provenance::new(Method::Brion, gv.seed),
    )
}

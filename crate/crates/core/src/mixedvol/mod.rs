//! Mixed volume polynomials: the Brion sum over maximal chains, the
//! evaluation formula for fans in `Q^d`, the star subdivision operator, the
//! deletion recursion, and the checks used to verify all of them.

mod brion;
mod decompose;
mod deletion;
mod evaluation;
mod operator;
mod verify;

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::poly::{int, RationalPoly, VarId};

pub use brion::{brion_volume, chain_matrix, generic_vectors, generic_vectors_with, ChainMatrix, GenericVectors};
pub use decompose::{decompose_weight, decompose_weight_seeded, Summand};
pub use deletion::{
    b_coefficients, b_coefficients_with, deletion_volume, deletion_volume_traced, lift_coloop,
    lift_non_coloop, BCoefficients, DeletionStep, DeletionTrace,
};
pub use evaluation::{
    evaluation_volume_fan, evaluation_volume_seeded, random_projection, EvaluationData,
};
pub use operator::{subdivision_operator, subdivision_operator_general};
pub use verify::{
    annihilator_check, chain_monomial, chow_rank_checks, chow_rank_checks_all, cross_validate,
    degree_of, degree_of_operator, verify_volume, AnnihilatorReport, ChowRankReport, CrossReport,
    Divergence, VerificationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Brion,
    Deletion,
    Evaluation,
    Operator,
    Lift,
    Input,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Brion => "brion",
            Method::Deletion => "deletion",
            Method::Evaluation => "evaluation",
            Method::Operator => "operator",
            Method::Lift => "lift",
            Method::Input => "input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub method: Method,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(method: Method, seed: Option<u64>) -> Self {
        Provenance { method, seed }
    }
}

/// A mixed volume: homogeneous of degree `degree`, in variables drawn from
/// `universe`. Equality ignores provenance.
#[derive(Clone, Debug)]
pub struct VolPolynomial {
    pub poly: RationalPoly,
    pub degree: usize,
    pub universe: BTreeSet<VarId>,
    pub provenance: Provenance,
}

impl PartialEq for VolPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.poly == other.poly
    }
}

impl VolPolynomial {
    pub fn new(
        poly: RationalPoly,
        degree: usize,
        universe: BTreeSet<VarId>,
        provenance: Provenance,
    ) -> Result<Self> {
        if !poly.is_homogeneous(degree) {
            return Err(Error::WrongDegree {
                expected: degree,
                found: poly.degree().unwrap_or(0),
            });
        }
        if let Some(v) = poly.variables().into_iter().find(|v| !universe.contains(v)) {
            return Err(Error::VariableUniverse(format!("{v:?} outside the universe")));
        }
        Ok(VolPolynomial {
            poly,
            degree,
            universe,
            provenance,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

impl fmt::Display for VolPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.pretty())
    }
}

/// Sampling policy for generic choices: coordinates start in
/// `[-initial_bound, initial_bound]` and the bound doubles on every retry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Genericity {
    pub initial_bound: i64,
    pub retries: usize,
}

impl Default for Genericity {
    fn default() -> Self {
        Genericity {
            initial_bound: 16,
            retries: 12,
        }
    }
}

impl Genericity {
    pub fn with_retries(retries: usize) -> Self {
        Genericity {
            retries,
            ..Self::default()
        }
    }

    /// Runs `attempt(rng, bound)` on fresh streams until it returns
    /// `Some`. The stream of attempt `k` is sub-seed `k` of `seed`.
    pub(crate) fn search<T>(
        &self,
        seed: u64,
        mut attempt: impl FnMut(&mut Sampler, usize) -> Option<T>,
    ) -> Result<T> {
        let mut bound = self.initial_bound.max(1);
        for k in 0..=self.retries {
            let mut sampler = Sampler::new(seed, k as u64, bound);
            if let Some(t) = attempt(&mut sampler, k) {
                return Ok(t);
            }
            bound = bound.saturating_mul(2).min(1 << 40);
        }
        Err(Error::GenericityExhausted(self.retries + 1))
    }
}

/// Seeded integer sampler in `[-bound, bound]`.
pub(crate) struct Sampler {
    rng: ChaCha8Rng,
    pub(crate) bound: i64,
}

impl Sampler {
    fn new(seed: u64, stream: u64, bound: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng, bound }
    }

    pub(crate) fn vector(&mut self, len: usize) -> Vector {
        (0..len)
            .map(|_| int(self.rng.gen_range(-self.bound..=self.bound)))
            .collect()
    }
}

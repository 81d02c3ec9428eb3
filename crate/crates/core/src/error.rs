use thiserror::Error;

use crate::poly::VarId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element label {0} outside 1..=63")]
    LabelOutOfRange(u32),
    #[error("cannot parse element label list {0:?}")]
    BadLabel(String),
    #[error("ground set is empty")]
    EmptyGroundSet,
    #[error("element {0} listed twice")]
    DuplicateElement(u32),
    #[error("basis family is empty")]
    NoBases,
    #[error("basis {0} is not a subset of the ground set")]
    BasisOutsideGround(String),
    #[error("bases have unequal sizes ({0} and {1})")]
    UnequalBasisSizes(usize, usize),
    #[error("basis exchange fails for B1={b1}, B2={b2}, x={x}")]
    ExchangeViolation { b1: String, b2: String, x: u32 },
    #[error("element {0} is a loop")]
    Loop(u32),
    #[error("invalid flat list: {0}")]
    InvalidFlats(String),
    #[error("ground set has {n} elements, flat enumeration limit is {limit}")]
    TooManyElements { n: usize, limit: usize },
    #[error("element {0} is not in the ground set")]
    NotInGroundSet(u32),
    #[error("cannot delete the last element")]
    DeleteLastElement,
    #[error("{{{0}}} is not a flat")]
    NotAFlat(u32),
    #[error("relabeling is not a bijection on the ground set")]
    NotBijective,
    #[error("variable {0} has no substitution")]
    UnmappedVariable(VarId),
    #[error("expected degree {expected}, found {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("cone is not in the fan")]
    ConeAbsent,
    #[error("ray label {0} already used")]
    LabelCollision(VarId),
    #[error("cone of dimension {0} cannot be subdivided")]
    ConeTooSmall(usize),
    #[error("cone rays are linearly dependent")]
    NotSimplicial,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("weight is not balanced at {0} codimension-one cones")]
    Unbalanced(usize),
    #[error("weight does not match the fan's maximal cones")]
    WeightShape,
    #[error("no generic choice found after {0} attempts")]
    GenericityExhausted(usize),
    #[error("chain has a zero coefficient under the supplied vectors")]
    StaleCertificate,
    #[error("element {0} is a coloop")]
    IsColoop(u32),
    #[error("element {0} is not a coloop")]
    NotColoop(u32),
    #[error("lift postcondition failed: {0}")]
    LiftInvariant(String),
    #[error("variable universe mismatch: {0}")]
    VariableUniverse(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("invalid document: {0}")]
    Document(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

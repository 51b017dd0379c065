use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid coefficient ring: {0}")]
    InvalidCoef(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no solution")]
    NoSolution,
    #[error("kill generators are not contained in the sub generators")]
    NotContained,
    #[error("map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("map is not an isomorphism")]
    NotIsomorphism,
    #[error("differentials do not square to zero in degree {0}")]
    NotAComplex(i64),
    #[error("not a chain map in degree {0}")]
    NotAChainMap(i64),
    #[error("double complex invariant fails: {0}")]
    NotADoubleComplex(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("invalid partial order: {0}")]
    InvalidOrder(String),
    #[error("restriction maps are not functorial along {0}")]
    NotFunctorial(String),
    #[error("subset is not closed (down-closed): {0}")]
    NotClosed(String),
    #[error("subset is not open (up-closed): {0}")]
    NotOpen(String),
    #[error("input is not a face poset: {0}")]
    NotFacePoset(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("no concentrating filtration found: {0}")]
    NotFound(String),
    #[error("quasi-isomorphism witness failed at step `{0}`")]
    WitnessFailure(String),
    #[error("filtration containment violated: {0}")]
    ContainmentViolated(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("not a cocycle: {0}")]
    NotACocycle(String),
    #[error("level transition mismatch in degree {degree}: {detail}")]
    TransitionMismatch { degree: i64, detail: String },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violation at {pointer}: {detail}")]
    InvariantViolation { pointer: String, detail: String },
}

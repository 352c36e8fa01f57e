use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular pencil")]
    SingularPencil,
    #[error("A not regular")]
    ARegularity,
    #[error("evaluation at pole of A")]
    PoleOfA,
    #[error("no admissible rotation found after {0} tries")]
    NoRotation(usize),
    #[error("normal rank deficient rows")]
    RankDeficientRows,
    #[error("inconsistent deflation count: {0}")]
    InconsistentDeflation(String),
    #[error("QZ iteration did not converge")]
    NoConvergence,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero row/column in M")]
    ZeroRowColumn,
    #[error("diverging scalings (left the 1e-16..1e16 band or drifting without bound); try approach 2")]
    DivergingScalings,
    #[error("not strongly minimal")]
    NotStronglyMinimal,
    #[error("A singular as polynomial matrix")]
    ExactSingular,
    #[error("exact oracle: {0}")]
    NotExact(String),
    #[error("structural identity violated: {0}")]
    StructuralInconsistency(String),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

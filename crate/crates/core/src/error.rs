use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The divisor does not divide the dividend over the integers.
    #[error("non-exact division: {0}")]
    NonExactDivision(String),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("tuple entries must be positive integers")]
    ZeroEntry,

    #[error("cannot balance a pair with negative weight gap {0}")]
    NegativeGap(i64),

    /// A cyclotomic exponent e_d is negative, so the ratio is not a polynomial.
    #[error("negative cyclotomic exponent e_{d} = {exponent}")]
    NegativeExponent { d: u64, exponent: i64 },

    #[error("(1+q)-unimodality routes disagree: product route {product}, interleaving route {interleaving}")]
    RouteDisagreement { product: bool, interleaving: bool },

    #[error("shape report invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parameters outside the family domain: {0}")]
    DomainViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("registry schema error: {0}")]
    Schema(String),

    #[error("registry entry fails Landau's criterion: {0}")]
    LandauRejection(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

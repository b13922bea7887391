use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at the specialisation: {0}")]
    Pole(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("cutoff exceeded: requested spin {requested}, cutoff {cutoff}")]
    CutoffExceeded { requested: String, cutoff: String },

    #[error("incomplete Peter-Weyl expansion in block A[{m},{n}]")]
    IncompleteExpansion { m: i64, n: i64 },

    #[error("result is not rational: {0}")]
    Irrational(String),

    #[error("residual transcendental dependence in pairing: {0}")]
    ResidualTranscendental(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no clean singular-value gap ({0}); try a larger cutoff")]
    NoSpectralGap(String),

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

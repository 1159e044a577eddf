use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mixed exact/approximate arithmetic")]
    ModeMismatch,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("leg position {0} repeated")]
    RepeatedLeg(usize),
    #[error("matrix is singular (smallest pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },
    #[error("operator is not unitary")]
    NotUnitary,
    #[error("operator does not satisfy the star condition")]
    StarFails,
    #[error("operator is not a twisted biunitary for the given Q")]
    TwistedFails,
    #[error("twist entries must be positive reals")]
    NonPositiveTwist,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("size cap exceeded: {needed} entries requested, cap is {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("not a *-algebra: {0}")]
    NotStarAlgebra(String),
    #[error("semisimple decomposition failed: {0}")]
    Decomposition(String),
    #[error("non-integral inclusion multiplicity {0}")]
    NonIntegral(f64),
    #[error("smaller algebra is not contained in the bigger one")]
    NotIncluded,
    #[error("empty tensor word")]
    EmptyWord,
    #[error("operands have different base operators")]
    BaseMismatch,
    #[error("group closure requires exact arithmetic")]
    ApproxGroup,
    #[error("operator is not diagonal in its first leg; group oracle does not apply")]
    NonDiagonal,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::CapExceeded { .. }
                | Error::Decomposition(_)
                | Error::NonIntegral(_)
                | Error::Inconsistent(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::ModeMismatch => "mode_mismatch",
            Error::Dimension(_) => "dimension",
            Error::RepeatedLeg(_) => "repeated_leg",
            Error::Singular { .. } => "singular",
            Error::NotUnitary => "not_unitary",
            Error::StarFails => "star_fails",
            Error::TwistedFails => "twisted_fails",
            Error::NonPositiveTwist => "non_positive_twist",
            Error::Inconsistent(_) => "inconsistent",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::NotStarAlgebra(_) => "not_star_algebra",
            Error::Decomposition(_) => "decomposition",
            Error::NonIntegral(_) => "non_integral",
            Error::NotIncluded => "not_included",
            Error::EmptyWord => "empty_word",
            Error::BaseMismatch => "base_mismatch",
            Error::ApproxGroup => "approx_group",
            Error::NonDiagonal => "non_diagonal",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse",
        }
    }
}

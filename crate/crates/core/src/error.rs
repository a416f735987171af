use thiserror::Error;

/// Domain errors. Every variant has a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("columns are linearly dependent")]
    Rank,
    #[error("index {0} is frozen")]
    FrozenIndex(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("result is not a Laurent polynomial")]
    NotLaurent,
    #[error("not in span: {0}")]
    NotInSpan(String),
    #[error("function has a non-positive coefficient")]
    NotPositive,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("endpoint is not generic: {0}")]
    NonGenericEndpoint(String),
    #[error("degree bound {0} reached")]
    Truncated(usize),
    #[error("not in the image of the monomial map")]
    NotInImage,
    #[error("mutable rank {0} is not supported")]
    RankUnsupported(usize),
    #[error("path meets the singular locus")]
    SingularPath,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Rank => "RankError",
            Error::FrozenIndex(_) => "FrozenIndex",
            Error::EmptyInput => "EmptyInput",
            Error::NotLaurent => "NotLaurent",
            Error::NotInSpan(_) => "NotInSpan",
            Error::NotPositive => "NotPositive",
            Error::Unbounded => "Unbounded",
            Error::NonGenericEndpoint(_) => "NonGenericEndpoint",
            Error::Truncated(_) => "Truncated",
            Error::NotInImage => "NotInImage",
            Error::RankUnsupported(_) => "RankUnsupported",
            Error::SingularPath => "SingularPath",
            Error::BadParams(_) => "BadParams",
            Error::Invalid(_) => "InvalidInput",
            Error::Inconsistent(_) => "Inconsistent",
        }
    }

    /// Numeric code used by the C ABI. Zero is reserved for success.
    pub fn numeric(&self) -> i32 {
        match self {
            Error::Rank => 1,
            Error::FrozenIndex(_) => 2,
            Error::EmptyInput => 3,
            Error::NotLaurent => 4,
            Error::NotInSpan(_) => 5,
            Error::NotPositive => 6,
            Error::Unbounded => 7,
            Error::NonGenericEndpoint(_) => 8,
            Error::Truncated(_) => 9,
            Error::NotInImage => 10,
            Error::RankUnsupported(_) => 11,
            Error::SingularPath => 12,
            Error::BadParams(_) => 13,
            Error::Invalid(_) => 14,
            Error::Inconsistent(_) => 15,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

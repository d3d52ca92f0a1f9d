use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("algebra is not associative: (e{0} e{1}) e{2} != e{0} (e{1} e{2})")]
    NotAssociative(usize, usize, usize),

    #[error("malformed rational {0:?}")]
    BadRational(String),

    #[error("non-split center: no rational splitting found after {attempts} attempts (seed {seed})")]
    NonSplitCenter { attempts: usize, seed: u64 },

    #[error("component of dimension {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("subspace is not nilpotent (powers did not vanish within {0} steps)")]
    NotNilpotent(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variables {0:?} are not part of the polynomial")]
    UnknownVariables(Vec<String>),

    #[error("duplicate variable {0:?}")]
    DuplicateVariable(String),

    #[error("missing assignment for variable {0:?}")]
    MissingAssignment(String),

    #[error("malformed polynomial: {0}")]
    BadPolynomial(String),

    #[error("mu = {mu} is too small, at least {needed} needed")]
    MuTooSmall { mu: usize, needed: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("prime exhaustion: no agreeing ranks after {0} primes")]
    PrimeExhaustion(usize),

    #[error("not an associated algebra (no word metadata)")]
    NotAssociated,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing codimension value c_{m} for block of size {d}")]
    MissingCodim { d: usize, m: usize },

    #[error("precision failure: {0}")]
    Precision(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Contract errors are the caller's fault (bad input, exhausted budget,
    /// non-split input); everything else is an internal fault.
    pub fn is_contract_error(&self) -> bool {
        !matches!(self, Error::Precision(_) | Error::PrimeExhaustion(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors shared across the crate. Arithmetic itself is exact and never
/// fails; errors signal violated preconditions or unsatisfiable searches.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular (rank {rank} < {size})")]
    SingularMatrix { rank: usize, size: usize },

    #[error("linear system has no solution")]
    NoSolution,

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("tensor is not skew-symmetric")]
    NotSkew,

    #[error("skew tensor has a nonzero component outside the hyperweb summand")]
    NotInSummand,

    #[error("restriction map is not injective")]
    NonInjectiveTau,

    #[error("group element is singular")]
    SingularG,

    #[error("hyperweb block B is singular")]
    SingularB,

    #[error("dual-side element D is singular")]
    SingularD,

    #[error("composition C^T B^-1 C leaves the hyperweb summand")]
    ConditionIrViolated,

    #[error("search exhausted its retry budget: {0}")]
    NotFound(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("modulus {0} is not an odd prime below 2^32")]
    BadModulus(u64),

    #[error("monad composition b∘a is nonzero; quotient data is inconsistent")]
    BadComposition,

    #[error("cohomology value out of range: {0}")]
    BadCohomology(String),
}

pub type Result<T> = std::result::Result<T, Error>;

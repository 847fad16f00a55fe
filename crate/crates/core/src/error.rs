use thiserror::Error;

/// Everything that can go wrong in the exact pipelines.
///
/// Variants are grouped by how the command-line front end reports them; see
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // invalid input
    #[error("coefficient has a nonzero imaginary part where a real polynomial is required")]
    NonRealInput,
    #[error("input is not positive semidefinite")]
    NotPsd,
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("matrix is not square")]
    NotSquare,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("matrix is degenerate (zero determinant)")]
    Degenerate,
    #[error("target of the Cauchy-Binet extension is degenerate")]
    DegenerateTarget,
    #[error("two-squares representations have different targets")]
    TargetMismatch,
    #[error("not a factorization of the given matrix")]
    NotAFactorization,
    #[error("factorization shape {rows}x{cols} is not supported")]
    ShapeUnsupported { rows: usize, cols: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("the point is not a zero of Q*Q")]
    NotAZero,
    #[error("one-sided evaluation is nonzero, linear factor does not divide")]
    NotDivisible,
    #[error("vectors are not totally isotropic")]
    NotIsotropic,
    #[error("isotropic completion needs an even dimension")]
    OddDimension,
    #[error("real split-off needs an even dimension")]
    OddDimensionReal,
    #[error("gram matrix S*S has a non-polynomial entry")]
    NotPolynomialGram,
    #[error("divisibility hypothesis violated: {0}")]
    DivisibilityViolated(String),
    #[error("norm is not a unit of the ring")]
    NormNotUnit,
    #[error("schema error: {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(String),

    // unsupported instance
    #[error("roots leave Q(i): {0}")]
    RootsNotInField(String),
    #[error("determinant is not a square")]
    DeterminantNotSquare,
    #[error("polynomial is not square-free")]
    NotSquareFree,
    #[error("residue field is not quadratically closed over Q(i): {0}")]
    ResidueFieldNotQuadraticallyClosed(String),
    #[error("positive constant {0} is not a norm from Q(i)")]
    ConstantNotNorm(String),

    // budget
    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),
    #[error("classification indeterminate: {0}")]
    Indeterminate(String),
    #[error("generator budget exhausted: {0}")]
    BudgetExhausted(String),

    // verification
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            VerificationFailed(_) => 2,
            RootsNotInField(_)
            | DeterminantNotSquare
            | NotSquareFree
            | ResidueFieldNotQuadraticallyClosed(_)
            | ConstantNotNorm(_) => 3,
            SearchExhausted(_) | Indeterminate(_) | BudgetExhausted(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

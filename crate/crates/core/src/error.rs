use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("ambient spaces or field degrees do not match")]
    AmbientMismatch,
    #[error("bilinear form is degenerate")]
    Degenerate,
    #[error("bilinear form is neutral")]
    NeutralForm,
    #[error("semilinear operator is singular")]
    SingularOperator,
    #[error("subspace is not characteristic")]
    NotCharacteristic,
    #[error("subspace is not strictly characteristic")]
    NotStrict,
    #[error("normalization root does not exist in GF({p}^{degree})")]
    RootUnavailable { p: u64, degree: usize },
    #[error("roots of unity of order {order} are not contained in GF({p}^{degree})")]
    RootFieldTooSmall { p: u64, degree: usize, order: u64 },
    #[error("descent did not reach a full fixed space within field degree {cap}")]
    DescentFailed { cap: usize },
    #[error("model inconsistent: {0}")]
    ModelInconsistent(String),
    #[error("enumeration of {required} candidates exceeds budget {budget}")]
    BudgetExceeded { required: String, budget: u64 },
    #[error("p^{m}+1 does not divide p^{sigma0}+1 for p = {p}")]
    InvalidM { p: u64, sigma0: usize, m: usize },
    #[error("vector is not a valid B-field for this datum")]
    InvalidBField,
    #[error("the distinguished vector lies in the extended subspace")]
    DistinguishedVectorInside,
    #[error("twist parameter must be non-zero")]
    ZeroLambda,
}

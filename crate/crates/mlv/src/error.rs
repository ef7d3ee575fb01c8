use thiserror::Error;

/// Errors shared across the workbench modules.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator not invertible mod {0}")]
    NonInvertibleDenominator(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("variable block mismatch")]
    BlockMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error("minor size {k} exceeds matrix dimensions {rows}x{cols}")]
    SizeError { k: usize, rows: usize, cols: usize },
    #[error("too many variables: {0} (limit 64)")]
    TooManyVariables(usize),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("ideal dimension requires a degrevlex basis")]
    WrongOrder,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("characteristic must be 0 or > {0}")]
    BadCharacteristic(u32),
    #[error("polynomial is not homogeneous of the expected degree")]
    NotHomogeneous,
    #[error("operation requires a homogeneous form (m = 1)")]
    NotForm,
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("pivot submatrix is singular")]
    SingularPivot,
    #[error("base point is not a solution: component {0} differs from target")]
    NotASolution(usize),
    #[error("degenerate sampling at stage {stage}: {detail}")]
    DegenerateSampling { stage: usize, detail: String },
    #[error("pivot denominator vanishes at the given parameters")]
    PivotDenominatorZero,
    #[error("more polynomials than variables: {m} > {n}")]
    TooManyPolynomials { m: usize, n: usize },
    #[error("all system components are zero")]
    TrivialSystem,
    #[error("families require an infinite coefficient field")]
    FiniteFieldFamily,
    #[error("no rational point found within the search budget")]
    NoRationalPointFound,
    #[error("malformed certificate: {0}")]
    MalformedCert(String),
    #[error("certificate check failed: {0}")]
    CheckFailed(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("{0}")]
    Msg(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid party layout: {0}")]
    InvalidLayout(String),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace product has imaginary part {0:e}")]
    ComplexTrace(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),

    #[error("ensemble `{name}` requires parameter `{param}`")]
    MissingParameter { name: String, param: String },

    #[error("parameter `{param}` = {value} is out of range: {reason}")]
    ParameterOutOfRange { param: String, value: f64, reason: String },

    #[error("ensemble `{0}` has no product factorization")]
    NotProduct(String),

    #[error("unknown party `{0}`")]
    UnknownParty(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("states are not mutually orthogonal: |<{0}|{1}>| = {2:e}")]
    NonOrthogonal(String, String, f64),

    #[error("expected single-qubit states, got dimension {0}")]
    NonQubit(usize),

    #[error("operator is not traceless (|Tr| = {0:e})")]
    NotTraceless(f64),

    #[error("{0} did not converge")]
    ConvergenceFailure(String),

    #[error("subsets do not cover label `{0}`")]
    CoverIncomplete(String),

    #[error("subset certificate failed verification: {0}")]
    SubsetCertificate(String),

    #[error("criterion not satisfied: {0}")]
    CriterionNotSatisfied(String),

    #[error("reachable outcome {0} has no exclusion claim")]
    UnmappedOutcome(String),

    #[error("expected {expected} states, got {got}")]
    WrongCount { expected: usize, got: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Every failure mode of the verification library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a jet with vanishing constant term")]
    DivisionByZeroJet,
    #[error("branch error: {0}")]
    BranchError(String),
    #[error("basepoint mismatch: expected {expected}, got {got}")]
    BasepointMismatch { expected: String, got: String },
    #[error("jet is not invertible (vanishing linear coefficient)")]
    NonInvertibleJet,
    #[error("jet order {0} exceeds the supported maximum")]
    OrderTooHigh(usize),
    #[error("stencil evaluation failed at x = {0}")]
    StencilEvaluationError(f64),
    #[error("hypergeometric series does not converge at |s| = {0}")]
    SeriesDomainError(f64),
    #[error("pole: {0}")]
    PoleError(String),
    #[error("singular point: {0}")]
    SingularPointError(String),
    #[error("solutions are linearly dependent")]
    LinearDependenceError,
    #[error("Wronskian vanishes")]
    ZeroWronskianError,
    #[error("zero denominator: {0}")]
    ZeroDenominatorError(String),
    #[error("point outside the admissible domain: {0}")]
    DomainError(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("degenerate input: {0}")]
    DegenerateError(String),
    #[error("coframe is singular at the requested point")]
    SingularCoframeError,
    #[error("metric is singular at the requested point")]
    SingularMetricError,
    #[error("unknown case id `{0}`")]
    UnknownCaseId(String),
    #[error("parse error: {0}")]
    ParseError(String),
}

pub type Result<T> = std::result::Result<T, Error>;

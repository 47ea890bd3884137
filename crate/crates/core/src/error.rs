use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state dimension mismatch: state has {state} qubits, oracle has {oracle}")]
    DimensionMismatch { state: u32, oracle: u32 },

    /// Closed-form and matrix increments disagree. This is an implementation
    /// defect, never a user error.
    #[error("increment mismatch: closed form {closed_form:e} vs matrix {matrix:e}")]
    IncrementMismatch { closed_form: f64, matrix: f64 },

    #[error("backend disagreement at step {step}: analytic {analytic:e} vs state vector {statevector:e}")]
    BackendMismatch {
        step: usize,
        analytic: f64,
        statevector: f64,
    },

    #[error("state left the target/complement plane at step {step}: leakage {leakage:e}")]
    Leakage { step: usize, leakage: f64 },

    #[error("rejection sampling exhausted {attempts} attempts at step {step}")]
    SamplingBudget { step: usize, attempts: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("qasm parse error on line {line}: {message}")]
    QasmParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

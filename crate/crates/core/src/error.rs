use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} exceeds guardrail ({value} > {limit})")]
    Guardrail {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("unsupported locality: term acts on {0} qubits (at most 2 supported)")]
    UnsupportedLocality(usize),

    #[error("gate {gate} is not admissible in native set {set}")]
    InadmissibleGate { gate: String, set: String },

    #[error("expectation value has imaginary part {0:e}")]
    ComplexExpectation(f64),

    #[error("numerical routine did not converge: {0}")]
    NonConvergence(String),

    #[error("trace drift {drift:e} exceeds {limit:e} at t = {time:e}")]
    TraceDrift { drift: f64, time: f64, limit: f64 },

    #[error("step size underflow: {0:e}")]
    StepUnderflow(f64),

    #[error("leakage {leakage:.4} exceeds {limit}")]
    Leakage { leakage: f64, limit: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("qasm parse error at line {line}: {msg}")]
    QasmParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures that signal a numerically untrustworthy result
    /// rather than bad input.
    pub fn is_numerical_integrity(&self) -> bool {
        matches!(
            self,
            Error::TraceDrift { .. } | Error::Leakage { .. } | Error::StepUnderflow(_)
        )
    }
}

use alloc::string::String;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("integration diverged at step {step}: state is not finite")]
    IntegrationDiverged { step: usize },
    #[error("cannot fit scaler: series is degenerate (constant or too short)")]
    DegenerateScale,
    #[error("series of length {len} is too short for window {window} + horizon {horizon}")]
    SeriesTooShort {
        len: usize,
        window: usize,
        horizon: usize,
    },
    #[error("split point {n_train} outside (0, {n_rows})")]
    BadSplit { n_train: usize, n_rows: usize },
    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("operand qubit count {got} does not match state qubit count {expected}")]
    QubitCountMismatch { got: usize, expected: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid noise parameter: {0}")]
    InvalidNoise(String),
    #[error("feature map: {0}")]
    FeatureMap(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("linear solve failed: {0}")]
    SolveFailed(String),
    #[error("degenerate variance in {0}")]
    DegenerateVariance(&'static str),
}

pub type Result<T> = core::result::Result<T, CoreError>;

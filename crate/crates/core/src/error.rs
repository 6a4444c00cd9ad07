use thiserror::Error;

use crate::control::Diagnostic;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("qubit index {index} out of range for a chain of {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{n} qubits requested; the dense engine supports 1..={max}")]
    QubitCount { n: usize, max: usize },

    #[error("matrix is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("not synthesizable: {0}")]
    NotSynthesizable(String),

    #[error("program failed validation with {} diagnostic(s): {}", .0.len(), join(.0))]
    Validation(Vec<Diagnostic>),

    #[error("{0}")]
    Unsupported(String),
}

fn join(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain specification: {0}")]
    InvalidChain(String),

    #[error("single-excitation path requires XX limit (gamma = {gamma}, delta = {delta})")]
    NotXxLimit { gamma: f64, delta: f64 },

    #[error("eigensolver failed to converge for eigenpair {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("transition amplitude |u| = {0} exceeds 1")]
    AmplitudeOutOfRange(f64),

    #[error("system of {qubits} qubits exceeds the supported limit of {limit}")]
    SizeLimit { qubits: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fixed-point iteration failed for mode {index}")]
    ModeNoConvergence { index: usize },

    #[error("propagation failed: {0}")]
    Propagation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::boxed::Box;
use alloc::string::String;

use crate::discrim::DiscriminationReport;

/// Errors raised across the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("gate is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("amplitude count {len} is not a power of two")]
    BadAmplitudeCount { len: usize },

    #[error("invalid qubit indices: {0}")]
    InvalidQubits(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("post-measurement state requires a projective measurement")]
    NotProjective,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("complex amplitude where a real one is required (imaginary part {imag:e})")]
    ComplexAmplitude { imag: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("inconclusive: value {value} matches no key table entry")]
    Inconclusive { value: f64 },

    #[error("ambiguous: value {value} matches more than one key table entry")]
    Ambiguous { value: f64 },

    #[error("ensemble state {index} lies outside the support of the average state")]
    SupportViolation { index: usize },

    #[error("optimizer did not converge in {} iterations (residual {:e})", .0.iterations, .0.residual)]
    NotConverged(Box<DiscriminationReport>),

    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

pub type Result<T> = core::result::Result<T, Error>;

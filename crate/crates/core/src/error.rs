use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the recursion engines, series layer, and ingestion.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error(
        "coefficient index {index} is out of range (sequence defined through index {available})"
    )]
    OutOfRange { index: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole at z = {z}")]
    Pole {
        z: Complex64,
        residue: Option<Complex64>,
    },

    #[error("|z| = {modulus} is outside the open unit disk")]
    Domain { modulus: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("root finding failed: {0}")]
    Roots(String),

    #[error("grid of {given} points aliases moments of order {needed}; need at least {needed}")]
    Aliasing { given: usize, needed: usize },

    #[error("Szegő condition violated: weight sample {index} is {value}")]
    SzegoCondition { index: usize, value: f64 },

    #[error("formula precondition failed: {0}")]
    Precondition(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("ill-conditioned system (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("integrability check failed near x = {endpoint}: {detail}")]
    Integrability { endpoint: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The Fock-space truncation needed to meet the tail tolerance exceeds
    /// the hard cap on the dimension.
    #[error("truncation cap of {cap} levels exceeded before the tail tolerance {tail_tol:e} was met")]
    TruncationCap { cap: usize, tail_tol: f64 },

    /// No finite minimum detectable phase exists for false-alarm budgets at
    /// or above one half.
    #[error("false alarm probability {p01} is in the degenerate regime (>= 0.5)")]
    DegenerateRegime { p01: f64 },

    #[error("overlap never drops to the threshold {kappa_star} on (0, {phi_max}]")]
    NotDetectable { kappa_star: f64, phi_max: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cannot parse state spec: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

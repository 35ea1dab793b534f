use thiserror::Error;

/// Errors raised by the tomography core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Bloch vector has norm {norm}, outside the unit ball")]
    Unphysical { norm: f64 },
    #[error("non-finite Bloch vector component")]
    NonFinite,
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("state is not pure (|s| = {norm})")]
    NotPure { norm: f64 },
    #[error("mixing weight {0} outside [0, 1/2]")]
    MixingWeight(f64),
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(&'static str),
    #[error("setting {setting} has no shots")]
    ZeroShots { setting: usize },
    #[error("count record does not match the measurement layout")]
    LayoutMismatch,
    #[error("counts in setting {setting} sum to {sum}, but {shots} shots were declared")]
    ShotMismatch { setting: usize, sum: u64, shots: u64 },
    #[error("measurement geometry violates its invariants: {0}")]
    Geometry(&'static str),
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("{needed} shots required, got {got}")]
    InsufficientShots { needed: u64, got: u64 },
    #[error("no Lagrange multiplier root: linear inversion lies inside the Bloch ball")]
    NoRoot,
    #[error("grid resolution {0} outside (0, 0.1]")]
    Resolution(f64),
    #[error("enumeration bound exceeded: {shots} shots per setting, limit {limit}")]
    EnumerationBound { shots: u64, limit: u64 },
    #[error("protocol not supported here")]
    UnsupportedProtocol,
    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("non-positive value {0} cannot be fitted on a log scale")]
    NonPositive(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

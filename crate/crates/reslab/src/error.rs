use num_complex::Complex64;
use thiserror::Error;

/// Error type shared by all solver layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation requested outside the admissible domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or out-of-range parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A quadrature or discretization could not reach the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// A least-squares fit had no usable data.
    #[error("fit error: {0}")]
    Fit(String),

    /// Numerical failure inside a solver (overflow, non-convergence, eigensolver breakdown).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A linear solve hit conditioning consistent with lambda being a resonance
    /// of the analytic part of the potential.
    #[error("near resonance of V2 at lambda = {lambda} (condition estimate {cond:.3e})")]
    NearResonance { lambda: Complex64, cond: f64 },

    /// The argument-principle contour passed too close to a zero; the caller
    /// should perturb the rectangle and retry.
    #[error("contour reposition needed: min |F| on boundary = {min_abs:.3e} below floor {floor:.3e}")]
    Reposition { min_abs: f64, floor: f64 },

    /// Invalid run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

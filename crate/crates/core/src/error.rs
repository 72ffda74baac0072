use thiserror::Error;

/// Crate-wide error type. The CLI maps variants onto process exit codes:
/// config errors exit 2, convergence errors exit 3, domain errors exit 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter values (non-positive gap, state outside the Bloch
    /// ball, noise support reaching the degeneracy point, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent configuration input.
    #[error("config error: {0}")]
    Config(String),

    /// Quadrature or sampling failed to reach the requested tolerance.
    #[error("convergence error in {context}: achieved {achieved:.3e}, required {required:.3e}; increase panels")]
    Convergence {
        context: String,
        achieved: f64,
        required: f64,
    },

    /// A rate fit was requested on data that cannot support one.
    #[error("fit error: {0}")]
    Fit(#[from] FitError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Failure modes of the power-law rate fit.
#[derive(Debug, Error)]
pub enum FitError {
    /// Fewer than the minimum number of usable envelope points in the window.
    #[error("insufficient oscillation: only {points} usable envelope points in [{window_lo:.3e}, {window_hi:.3e}], need at least {required}")]
    InsufficientOscillation {
        points: usize,
        required: usize,
        window_lo: f64,
        window_hi: f64,
    },

    /// Deviations sit at or below the quadrature noise floor across the
    /// requested window. `usable` is the sub-window (if any) where the signal
    /// still clears the floor.
    #[error("noise floor reached over the requested window; usable sub-window: {usable:?}")]
    FloorReached { usable: Option<(f64, f64)> },

    /// Window bounds or series data are malformed (non-finite, non-positive,
    /// or empty after filtering).
    #[error("invalid fit input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

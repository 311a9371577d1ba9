use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("region does not fit the grid: {0}")]
    RegionOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// A field violates a sign or boundedness hypothesis required by an estimate.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("total flux is unbounded for {0}")]
    UnboundedFlux(String),

    /// A contour passes through (or too close to) a zero of the wave function.
    #[error("modulus {modulus:.3e} below {threshold} on the circle of radius {radius}")]
    ModulusTooSmall {
        modulus: f64,
        threshold: f64,
        radius: f64,
    },

    /// The above-threshold set does not admit a single-valued phase.
    #[error("no single-valued phase: {0}")]
    PhaseObstruction(String),

    /// Descent produced a non-finite state or could not make progress.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_same_grid(
    a: &crate::grid::GridSpec,
    b: &crate::grid::GridSpec,
    what: &str,
) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "{what}: ({}, {}) vs ({}, {})",
            a.halfwidth(),
            a.points(),
            b.halfwidth(),
            b.points()
        )))
    }
}

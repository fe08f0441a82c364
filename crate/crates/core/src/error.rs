use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha must lie in the open interval (0, 2), got {0}")]
    AlphaOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integrand returned a non-finite value ({value}) at x = {x}")]
    NonFiniteIntegrand { x: f64, value: f64 },

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate}")]
    QuadratureFailed { value: f64, error_estimate: f64 },

    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),

    #[error("cell count {count} exceeds the configured cap of {cap} cells")]
    CellCapExceeded { count: usize, cap: usize },

    #[error("domain is unbounded; no finite cell grid exists")]
    UnboundedDomain,

    #[error("eigenvalue iteration failed to converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("no grid cell lies strictly inside the domain at eps = {0}")]
    NoInteriorCells(f64),

    #[error("Green function is singular on the diagonal x = y")]
    GreenDiagonal,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

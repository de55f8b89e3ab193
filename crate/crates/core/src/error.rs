use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mode index {mode} out of range for a {modes}-mode space")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("invalid mode space: {0}")]
    InvalidSpace(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation deficit {deficit:e} exceeds {limit:e} at dimension {dim}")]
    Truncation { deficit: f64, limit: f64, dim: usize },

    #[error("overdamped bus: kappa_b = {kappa_b:e} is not below sqrt(32) g = {limit:e}")]
    Overdamped { kappa_b: f64, limit: f64 },

    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "integration failed at t = {t:e} s after {steps} steps (step {step:e} s, error estimate {error:e})"
    )]
    Integration {
        t: f64,
        steps: usize,
        step: f64,
        error: f64,
    },

    #[error(
        "reconstruction did not converge in {iterations} iterations (residual {residual:e}, relative change {change:e})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        change: f64,
    },

    #[error("degenerate data: {0}")]
    Degenerate(&'static str),

    #[error("tomogram set is missing the {0} basis")]
    MissingBasis(char),

    #[error("unphysical input: {0}")]
    Unphysical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}

use thiserror::Error;

/// Errors raised by the analysis, optimization and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the formula being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition on the inputs is violated (for example a
    /// backoff schedule that is not monotone non-increasing).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A bracketing root finder was handed an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An iterative solver stopped before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The optimal initial transmission probability exceeds one for the
    /// requested backoff shape, so the unconstrained optimum cannot be reached.
    #[error("optimal initial transmission probability {q0_hat} exceeds 1")]
    Unachievable { q0_hat: f64 },

    /// The result exists but lies outside the range of `f64`.
    #[error("out of floating-point range: {0}")]
    Underflow(String),

    /// A numerical invariant that the theory guarantees did not hold.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Precondition(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

pub(crate) fn ensure_probability(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1], got {value}")))
    }
}

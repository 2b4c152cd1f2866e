use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `1 + (1 - q) b` vanished (or the q-exponential diverged for q > 1).
    #[error("pole: {0}")]
    Pole(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at (or across) the point x = -1/gamma.
    #[error("singularity at x = {at}")]
    Singularity { at: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {panels} panels")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("energy bracket [{lo}, {hi}] does not straddle a sign change of the boundary mismatch")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("shooting solution has {found} interior nodes, expected {expected}")]
    NodeMismatch { expected: usize, found: usize },

    /// A trajectory left the admissible region between `t_lo` and `t_hi`.
    #[error("trajectory left the domain between t = {t_lo} and t = {t_hi}")]
    DomainExit { t_lo: f64, t_hi: f64 },
}

impl Error {
    pub(crate) fn pole(msg: impl Into<String>) -> Self {
        Error::Pole(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for the errors a caller can attribute to out-of-domain input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Pole(_)
                | Error::Domain(_)
                | Error::Singularity { .. }
                | Error::InvalidParameter(_)
                | Error::DomainExit { .. }
        )
    }
}

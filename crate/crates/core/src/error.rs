use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: d={left} vs d={right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported spatial dimension {0} (expected 1 or 3)")]
    UnsupportedDimension(usize),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("spacelike step (interval {0:e})")]
    SpacelikeStep(f64),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("inadmissible segment {segment} in path")]
    InadmissiblePath { segment: usize },

    #[error("need at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    #[error("negative norm {0:e} under the square-root form")]
    NegativeNorm(f64),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("kernels or fields live on different lattices")]
    LatticeMismatch,

    #[error("no admissible chain exists")]
    EmptyDomain,

    #[error("stability bound violated: {0}")]
    Unstable(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("time slice {0} outside the lattice")]
    SliceOutOfRange(usize),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {value}")))
    }
}

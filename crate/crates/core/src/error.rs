use thiserror::Error;

/// Errors raised by the variational engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error(
        "degenerate tangent basis: Gram condition number {condition:.3e} exceeds {threshold:.1e}"
    )]
    DegenerateBasis { condition: f64, threshold: f64 },

    #[error("degenerate symplectic form on basis: condition number {condition:.3e}")]
    DegenerateSymplectic { condition: f64 },

    #[error(
        "packet support leaves the box along axis {axis}: needs {required:.4} < {half_box:.4}"
    )]
    SupportViolation {
        axis: usize,
        required: f64,
        half_box: f64,
    },

    #[error("accuracy loss: {0}")]
    Accuracy(String),

    #[error("negative radicand {value:.3e} in residual evaluation")]
    NegativeRadicand { value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step size underflow at t = {t}: dt = {dt:.3e}")]
    StepSizeUnderflow { t: f64, dt: f64 },

    #[error(
        "split-step stability threshold exceeded: dt * hbar * k_max^2 / 2 = {phase:.3} >= pi/4"
    )]
    Stability { phase: f64 },

    #[error("no snapshot at t = {0}")]
    MissingSnapshot(f64),

    #[error("time grids do not match: {0}")]
    TimeGridMismatch(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::GridMismatch
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter { .. }
                | Error::SupportViolation { .. }
                | Error::Unsupported(_)
                | Error::TimeGridMismatch(_)
                | Error::MissingSnapshot(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

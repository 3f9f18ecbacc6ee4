use thiserror::Error;

/// Errors raised by the valuation kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} outcomes, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("cannot condition on cell {cell}: total {measure} weight is zero")]
    Conditioning { cell: usize, measure: String },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular Gram matrix: assets {dependent:?} are linearly dependent under P")]
    SingularGram { dependent: Vec<usize> },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("configuration error: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects NaN and infinities.
pub(crate) fn require_finite(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(name, format!("must be finite, got {x}")))
    }
}

pub(crate) fn require_positive(name: &'static str, x: f64) -> Result<f64> {
    require_finite(name, x)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(name, format!("must be > 0, got {x}")))
    }
}

pub(crate) fn require_nonnegative(name: &'static str, x: f64) -> Result<f64> {
    require_finite(name, x)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(invalid(name, format!("must be >= 0, got {x}")))
    }
}

pub(crate) fn require_correlation(name: &'static str, x: f64) -> Result<f64> {
    require_finite(name, x)?;
    if (-1.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(invalid(name, format!("must lie in [-1, 1], got {x}")))
    }
}

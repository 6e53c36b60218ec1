use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid Fock truncation dimension {0} (must be >= 2)")]
    InvalidDimension(usize),

    #[error("index {index} out of range for {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hamiltonian is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("unstable dynamics: eigenvalue {eigenvalue} has growth rate {growth:e} MHz")]
    Unstable { eigenvalue: Complex64, growth: f64 },

    #[error("singular linear system at ω = {omega} MHz")]
    Singular { omega: f64 },

    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Fock truncation not converged: {0}")]
    NotConverged(String),

    #[error("nonclassicality witness undefined (denominator {0:e})")]
    UndefinedWitness(f64),

    #[error("nonclassicality witness {0} below its lower bound -1")]
    WitnessBound(f64),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by the physics (growth, singular response),
    /// as opposed to bad input.
    pub fn is_instability(&self) -> bool {
        matches!(
            self,
            Error::Unstable { .. } | Error::Singular { .. } | Error::DegenerateSteadyState(_)
        )
    }
}

/// Checks `value > 0` and finite.
pub(crate) fn require_positive(field: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::param(field, format!("must be positive, got {value}")));
    }
    Ok(())
}

pub(crate) fn require_non_negative(field: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::param(field, format!("must be >= 0, got {value}")));
    }
    Ok(())
}

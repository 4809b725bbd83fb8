use thiserror::Error;

use crate::scalar::Field;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}x{expected}, got {found}x{found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: Field, right: Field },

    #[error("singular matrix (smallest singular value {sigma_min:.3e} below {threshold:.3e})")]
    SingularMatrix { sigma_min: f64, threshold: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("entrywise conjugation is not an automorphism over {0}")]
    IncompatibleAutomorphism(Field),

    #[error("automorphism check failed: {property} (residual {residual:.3e})")]
    ValidationFailure { property: &'static str, residual: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("point is not critical (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NotCritical { residual: f64, tolerance: f64 },

    #[error("center is not a critical point (residual {residual:.3e})")]
    NotCriticalCenter { residual: f64 },

    #[error("argument outside the Cayley domain (smallest singular value {sigma_min:.3e})")]
    OutsideDomain { sigma_min: f64 },

    #[error("closed-form flow is singular at t = {t}")]
    SingularEvaluation { t: f64 },

    #[error("integrator step rejected at t = {t}: defect {defect:.3e} before projection")]
    StepRejected { t: f64, defect: f64 },

    #[error("matrix is not a Hermitian square root of YY* (residual {residual:.3e})")]
    NotSquareRoot { residual: f64 },

    #[error("{relation} violated at point #{index} (residual {residual:.3e})")]
    RelationViolated {
        relation: &'static str,
        index: usize,
        residual: f64,
    },

    #[error("block structure violated: {0}")]
    StructureViolated(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quantization level n must be nonzero")]
    ZeroLevel,
    #[error("vector is not tangent at the base point (|v·u| = {residual:e})")]
    NotTangent { residual: f64 },
    #[error("point lies at the excluded pole of the {chart:?} chart")]
    ExcludedPole { chart: crate::sphere::Chart },
    #[error("relative tolerance {0:e} outside [1e-13, 1e-3]")]
    Tolerance(f64),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("loop does not close: |ψ₁(q) - q| = {deviation:e} exceeds {tol:e}")]
    NotClosed { deviation: f64, tol: f64 },
    #[error("point is not critical: |grad f| = {grad_norm:e}")]
    NotCritical { grad_norm: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("phase unwrapping failed: jump of {jump} rev persists at {samples} samples")]
    Unwrap { jump: f64, samples: usize },
    #[error("family is not closed")]
    OpenFamily,
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("zeta has a pole at s = 1")]
    PoleAtOne,
    #[error("argument is a pole of the gamma quotient")]
    Pole,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("imaginary residue {residue:e} exceeds tolerance {tol:e}")]
    ImaginaryResidueTooLarge { residue: f64, tol: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("capacity exceeded: requested {requested}, limit {limit}")]
    CapacityExceeded { requested: u64, limit: u64 },
    #[error("argument {x} outside table range {limit}")]
    OutOfRange { x: f64, limit: u64 },
    #[error("divisor table too small: need {needed}, have {limit}")]
    TableTooSmall { needed: u64, limit: u64 },
    #[error("phase condition violated: {0}")]
    ConditionViolation(String),
    #[error("tolerance {tol:e} not met, estimate {err_est:e}")]
    ToleranceNotMet { value: Complex64, err_est: f64, tol: f64 },
    #[error("non-finite integrand sample at t = {0}")]
    NonFiniteSample(f64),
    #[error("unknown kind: {0}")]
    UnknownKind(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

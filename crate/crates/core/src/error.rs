use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the numerical routines can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {name} = {value} out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("point is not a fixed point (residual {residual:e})")]
    NotAFixedPoint { residual: f64 },
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("state norm {norm:e} exceeded the blow-up bound at t = {t}")]
    BlowupDetected { t: f64, norm: f64 },
    #[error("launch bracket K - c ln(xi) = {value} is not positive at xi = {xi}")]
    BracketNotPositive { xi: f64, value: f64 },
    #[error("profile value {f:e} below the degeneracy floor")]
    Degenerate { f: f64 },
    #[error("could not bracket the shooting parameter in [{low}, {high}]")]
    BracketFailure { low: f64, high: f64 },
    #[error("classification is not monotone in K: {flips} flips over the bracket")]
    NonMonotoneClassification { flips: usize },
    #[error("insufficient range for fit: {0}")]
    InsufficientRange(&'static str),
    #[error("max(u0) = {max_u0} exceeds the profile at its smallest resolved point ({f_max})")]
    NoDominatingRadius { max_u0: f64, f_max: f64 },
    #[error("time step {dt:e} exceeds the stability bound {limit:e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("support reached the outer boundary at t = {t}")]
    SupportReachedBoundary { t: f64 },
    #[error("test function does not vanish near the boundary of the domain")]
    SupportViolation,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

//! Outward-rounded real intervals and complex rectangles.

mod complex;
mod real;
pub mod round;
mod scalar;

pub use complex::ComplexRect;
pub use real::RealInterval;
pub use scalar::{Scalar, ScalarParseError};
pub(crate) use scalar::rational_interval;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("divisor contains zero")]
    DivisorContainsZero,
    #[error("domain violation in {op} at endpoint {endpoint}")]
    DomainViolation { op: &'static str, endpoint: f64 },
    #[error("branch cut violation in {op}")]
    BranchCutViolation { op: &'static str },
    #[error("invalid interval [{lo}, {hi}]")]
    Invalid { lo: f64, hi: f64 },
}

//! Crate-wide error type.

use crate::lattice::HalfLatticePoint;
use crate::laurent::LaurentPoly;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable-table mismatch")]
    VarTableMismatch,

    /// Exact division left a nonzero remainder.
    #[error("non-divisible: remainder {remainder}")]
    NonDivisible { remainder: Box<LaurentPoly> },

    #[error("term cap of {cap} exceeded")]
    TermCap { cap: usize },

    #[error("unassigned variable {0}")]
    Unassigned(String),

    #[error("zero assigned to {0}, which occurs with a negative exponent")]
    ZeroAtNegative(String),

    #[error("non-invertible image: variable occurs with a negative exponent")]
    NonInvertibleImage,

    #[error("division by zero")]
    ZeroDivisor,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("incomplete initial data: missing {0}")]
    MissingPoint(HalfLatticePoint),

    #[error("inapplicable move: {0}")]
    Inapplicable(String),

    #[error("window too small: need a margin of at least {required} cells")]
    WindowTooSmall { required: i32 },

    #[error("hypothesis failure: {0}")]
    Hypothesis(String),

    #[error("no positive root")]
    NoPositiveRoot,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

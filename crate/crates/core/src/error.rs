use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("index {index} outside stored range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("sequence is not log-convex at index {index}")]
    NotLogConvex { index: usize },

    #[error("sandwich constants exceed the cap (ln t1 = {ln_t1}, ln t2 = {ln_t2})")]
    NoSandwichConstants { ln_t1: f64, ln_t2: f64 },

    #[error("derivative order {order} exceeds oracle depth {max}")]
    DepthExceeded { order: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("series terms not contracting at grade {grade} (ratio {ratio}); increase N")]
    IncreaseOrder { grade: usize, ratio: f64 },

    #[error("tolerance {tol} not reached before order {order}")]
    ToleranceNotReached { tol: f64, order: usize },
}

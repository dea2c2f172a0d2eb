//! Error type shared by the library modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operator or curve parameters violate a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A scalar argument fell outside its admissible interval.
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Evaluation point is not inside the triangle.
    #[error("point ({x}, {y}) lies outside the triangle")]
    OutsideDomain { x: f64, y: f64 },

    /// Abel-Jensen sum hit the 0^{-1} corner (j = 0, k = 0 with x = 0).
    #[error("Abel-Jensen sum undefined: zero base raised to a negative power")]
    UndefinedSum,

    /// Nodal-value vector does not match the operator degree.
    #[error("expected {expected} nodal values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Curve specification violates the domain invariants.
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// Curve inversion failed to bracket the root within the iteration cap.
    /// Unreachable for specs that passed construction; signals an invariant breach.
    #[error("curve inversion did not converge within {0} iterations")]
    NonConvergence(usize),

    /// Field lacks the analytic derivative required by a Peano-kernel routine.
    #[error("field '{field}' provides no {which}")]
    MissingDerivative { field: String, which: &'static str },

    /// A moment gap came out negative beyond numerical tolerance.
    #[error("moment gap {0} negative beyond tolerance")]
    NegativeGap(f64),

    /// Field specification string could not be resolved.
    #[error("unknown field spec '{0}'")]
    UnknownField(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Cheney-Sharma surface approximation on a triangle with one curved side.
//!
//! The second-kind Cheney-Sharma operator is a positive Bernstein-type
//! operator whose basis involves Abel-Jensen powers `(t + i b)^{i-1}`; it
//! reduces to the Bernstein operator at `b = 0`, interpolates the interval
//! endpoints, and reproduces linear functions. This crate extends it to a
//! triangle whose legs lie on the coordinate axes and whose hypotenuse is a
//! strictly decreasing curve `y = f(x)` with inverse `x = g(y)`:
//!
//! * [`basis`] — the univariate basis, Abel-Jensen sums, and the closed-form
//!   second moment, all evaluated in logarithm space for stability;
//! * [`domain`] — the curved triangle, curve families, membership tests and
//!   the uniform operator node partitions;
//! * [`operators`] — the directional operators `Qx`, `Qy`, their products
//!   `P1`, `P2`, and Boolean sums `S1`, `S2`, plus pointwise remainders;
//! * [`analysis`] — moduli of continuity, second-moment gaps,
//!   modulus-based remainder bounds and the Peano-kernel representation;
//! * [`fields`] — the built-in scalar test fields;
//! * [`verify`] — named property suites over the library invariants;
//! * [`cli`] — configuration and the `sample`/`verify`/`bounds`/`nodes`
//!   commands behind the `cstri` binary.

pub mod analysis;
pub mod basis;
pub mod cli;
pub mod domain;
pub mod error;
pub mod fields;
pub mod operators;
pub mod verify;

pub use basis::{abel_sum, apply_univariate, basis_weights, second_moment};
pub use basis::{BasisWeights, CheneySharmaParams};
pub use domain::{Axis, CurveSpec, CurvedTriangle, Edge};
pub use error::{Error, Result};
pub use fields::ScalarField;
pub use operators::{
    apply, apply_p1, apply_p2, apply_qx, apply_qy, apply_s1, apply_s2, remainder, BivariateParams,
    OperatorKind,
};

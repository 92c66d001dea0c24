//! Query-complexity laboratory for finding ε-stationary points of smooth
//! univariate functions.
//!
//! The crate is organised around five pieces:
//!
//! * [`instance`]: exact piecewise-quadratic functions, the hard-instance
//!   constructions and their audits (smoothness, objective gap, stationary
//!   sets).
//! * [`oracle`]: first-order and zeroth+first-order oracles with exact query
//!   accounting, plus the rescaling reduction to `β = Δ = 1`.
//! * [`solvers`]: gradient descent, `RandomSearch`/`BinarySearch` and the
//!   zeroth-order suite (`DecreaseGap`, `BinarySearchII`, `BinarySearchIII`).
//! * [`adversary`]: the resisting oracle, its materialization into a
//!   consistent 1-smooth function, and the stdio line protocol for external
//!   solvers.
//! * [`harness`]: trial matrices, slope estimation, CSV and SVG output.

pub mod adversary;
pub mod error;
pub mod harness;
pub mod instance;
pub mod oracle;
pub mod solvers;

pub use error::{AdversaryError, HarnessError, InstanceError, OracleError, SolverError};
pub use instance::{Interval, PiecewiseInstance, QuadPiece, Tail, VerifyReport};
pub use oracle::{OracleHandle, OracleKind, ProblemMeta, Response};
pub use solvers::{SolverConfig, SolverOutcome, SolverStatus};

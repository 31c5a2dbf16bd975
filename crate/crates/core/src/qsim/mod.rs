//! Exact two-particle quantum mechanics for a single EPR pair.
//!
//! Every pair is held as a 4×4 density matrix. Operations are pure: they
//! return new states and take randomness only from the caller.

mod state;
mod types;

pub use state::{Mat4, PairState, HERMITIAN_TOL, PSD_FLOOR, TRACE_TOL};
pub use types::{Axis, BellKind, Outcome, PauliOp, Side, Sides};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("axis is not a unit vector (norm {norm})")]
    NonUnitAxis { norm: f64 },
    #[error("probability {p} outside [0, 1]")]
    ProbabilityOutOfRange { p: f64 },
    #[error("cannot mix an empty list of states")]
    EmptyMixture,
    #[error("matrix is not Hermitian (max deviation {error:e})")]
    NotHermitian { error: f64 },
    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
}

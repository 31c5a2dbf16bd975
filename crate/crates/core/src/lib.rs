//! Simulation of an EPR-pair bit commitment and the coin toss built on it.
//!
//! - [`qsim`]: exact density matrices for single pairs.
//! - [`protocol`]: the commitment steps, sessions and the coin toss.
//! - [`noise`]: depolarizing budgets, calibration and recovery confidence.
//! - [`adversary`]: cheating strategies and Monte Carlo bias estimates.
//! - [`report`]: serializable run reports.

pub mod adversary;
pub mod noise;
pub mod protocol;
pub mod qsim;
pub mod report;
pub mod stats;

pub use adversary::{AliceStrategy, BiasReport, BobStrategy, Forgery, Game, Scenario, Suppression};
pub use noise::NoiseBudget;
pub use protocol::{Bit, CoinOutcome, Decision, ProtocolConfig, Session, Verdict, VerdictMode};
pub use qsim::{Axis, BellKind, Outcome, PairState, PauliOp, Side, Sides};
pub use report::{RunReport, SCHEMA_VERSION};
pub use stats::Estimate;

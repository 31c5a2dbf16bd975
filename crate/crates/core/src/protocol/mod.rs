//! The commitment protocol and the coin toss built on it.
//!
//! [`steps`] holds each step as a plain function over a [`PairRegister`];
//! [`Session`] runs them in order, owns the randomness and the transcript,
//! and hands each party a view that exposes only what it may observe.

mod coin;
mod config;
mod register;
mod session;
pub mod steps;
mod transcript;

pub use coin::{coin_outcome, coin_toss, CoinOutcome};
pub use config::{AxisPolicy, ConfigError, ProtocolConfig, Thresholds, VerdictMode};
pub use register::{PairRegister, Slot};
pub use session::{AliceView, BobView, Phase, Session};
pub use steps::{
    AbortReason, CheckReport, CommitmentRecord, Decision, Disclosure, ScrambleMode, Unscramble,
    Verdict,
};
pub use transcript::{Sender, Transcript, TranscriptRecord};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::noise::NoiseError;
use crate::qsim::Side;

/// A committed bit; serialized as `0` or `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Bit {
        if rng.random::<bool>() {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl From<Bit> for u8 {
    fn from(b: Bit) -> u8 {
        match b {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

impl TryFrom<u8> for Bit {
    type Error = String;

    fn try_from(v: u8) -> Result<Bit, String> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(format!("bit must be 0 or 1, got {v}")),
        }
    }
}

impl std::fmt::Display for Bit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("{op} is not allowed in phase {phase:?}")]
    WrongPhase { op: &'static str, phase: Phase },
    #[error("{0}")]
    Precondition(&'static str),
    #[error("source rejected: {failures} check failures, {allowed} allowed")]
    SourceRejected { failures: usize, allowed: usize },
    #[error("entanglement check rejected: {failures} failures, {allowed} allowed")]
    EntanglementRejected { failures: usize, allowed: usize },
    #[error("{0:?} has already scrambled")]
    DoubleScramble(Side),
    #[error("need {needed} positions, only {available} available")]
    NotEnoughPositions { needed: usize, available: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("only {found} usable positions, need at least {needed}")]
    InsufficientPositions { found: usize, needed: usize },
}

impl ProtocolError {
    /// True for failures produced by the protocol's own checks, as opposed
    /// to misuse of the API.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            ProtocolError::SourceRejected { .. } | ProtocolError::EntanglementRejected { .. }
        )
    }
}

//! The protocol steps as functions over a [`PairRegister`].
//!
//! These carry no phase bookkeeping; [`crate::protocol::Session`] sequences
//! them and decides who may see what.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{AxisPolicy, Thresholds, VerdictMode};
use super::register::PairRegister;
use super::{Bit, ProtocolError};
use crate::qsim::{Axis, Outcome, PauliOp, Side};

/// Result of an entanglement check on a sample of pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checked: usize,
    pub failures: usize,
    pub allowed: usize,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures <= self.allowed
    }
}

/// Failures tolerated among `checks` pairs whose expected anti-correlation
/// failure rate is `rate`: `1.5·rate` plus three binomial standard
/// deviations, and none at all for a noiseless source.
pub fn allowed_failures(checks: usize, rate: f64) -> usize {
    if rate <= 0.0 || checks == 0 {
        return 0;
    }
    let m = checks as f64;
    let frac = 1.5 * rate + 3.0 * (rate * (1.0 - rate) / m).sqrt();
    ((frac * m) + 1e-9).floor() as usize
}

/// Whether a scrambling party applies random Paulis or leaves its
/// particles alone (recorded as identity).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrambleMode {
    Uniform,
    Skip,
}

/// What Alice does to a checked pair before handing her particle to Bob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unscramble {
    /// Re-applies her recorded Pauli, restoring the singlet.
    Honest,
    /// Sends the particle as is.
    Skip,
}

fn check_axis<R: Rng + ?Sized>(policy: &AxisPolicy, rng: &mut R) -> Axis {
    match policy {
        AxisPolicy::FixedSecret(a) => *a,
        AxisPolicy::RandomXZ => Axis::random_xz(rng),
    }
}

fn choose_unconsumed<R: Rng + ?Sized>(
    reg: &PairRegister,
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>, ProtocolError> {
    let open = reg.unconsumed();
    if open.len() < count {
        return Err(ProtocolError::NotEnoughPositions {
            needed: count,
            available: open.len(),
        });
    }
    let mut picked: Vec<usize> = index::sample(rng, open.len(), count)
        .into_iter()
        .map(|i| open[i])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Measures both particles of each chosen position along a common axis and
/// consumes it. Returns the number of non-anti-correlated results.
fn measure_pairs<R: Rng + ?Sized>(
    reg: &mut PairRegister,
    positions: &[usize],
    policy: &AxisPolicy,
    rng: &mut R,
) -> usize {
    let mut failures = 0;
    for &k in positions {
        let axis = check_axis(policy, rng);
        let slot = reg.slot_mut(k);
        let (a, post) = slot.state.measure_spin(Side::Alice, axis, rng);
        let (b, post) = post.measure_spin(Side::Bob, axis, rng);
        slot.state = post;
        slot.consumed = true;
        if a == b {
            failures += 1;
        }
    }
    failures
}

/// Alice tests `count` random pairs from her source before using it.
pub fn alice_source_check<R: Rng + ?Sized>(
    reg: &mut PairRegister,
    count: usize,
    policy: &AxisPolicy,
    allowed: usize,
    rng: &mut R,
) -> Result<CheckReport, ProtocolError> {
    let chosen = choose_unconsumed(reg, count, rng)?;
    let failures = measure_pairs(reg, &chosen, policy, rng);
    let report = CheckReport {
        checked: count,
        failures,
        allowed,
    };
    if report.passed() {
        Ok(report)
    } else {
        Err(ProtocolError::SourceRejected { failures, allowed })
    }
}

/// Applies one Pauli per unconsumed position on the given side and records
/// it. Returns the record in position order.
pub fn scramble<R: Rng + ?Sized>(
    reg: &mut PairRegister,
    side: Side,
    mode: ScrambleMode,
    rng: &mut R,
) -> Result<Vec<PauliOp>, ProtocolError> {
    if reg.is_scrambled(side) {
        return Err(ProtocolError::DoubleScramble(side));
    }
    let mut record = Vec::with_capacity(reg.unconsumed_count());
    for k in reg.unconsumed() {
        let u = match mode {
            ScrambleMode::Uniform => PauliOp::random(rng),
            ScrambleMode::Skip => PauliOp::Id,
        };
        let slot = reg.slot_mut(k);
        slot.state = slot.state.apply_pauli(side, u);
        match side {
            Side::Alice => slot.alice_pauli = Some(u),
            Side::Bob => slot.bob_pauli = Some(u),
        }
        record.push(u);
    }
    reg.mark_scrambled(side);
    Ok(record)
}

/// Bob picks `count` positions; Alice undoes her Pauli on them (or not) and
/// sends her particles; Bob measures both particles of each pair.
pub fn bob_entanglement_check<R: Rng + ?Sized>(
    reg: &mut PairRegister,
    count: usize,
    unscramble: Unscramble,
    policy: &AxisPolicy,
    allowed: usize,
    rng: &mut R,
) -> Result<CheckReport, ProtocolError> {
    if !reg.is_scrambled(Side::Alice) {
        return Err(ProtocolError::Precondition(
            "Bob's check needs Alice's scramble first",
        ));
    }
    let chosen = choose_unconsumed(reg, count, rng)?;
    if unscramble == Unscramble::Honest {
        for &k in &chosen {
            let slot = reg.slot_mut(k);
            if let Some(u) = slot.alice_pauli {
                slot.state = slot.state.apply_pauli(Side::Alice, u);
            }
        }
    }
    let failures = measure_pairs(reg, &chosen, policy, rng);
    let report = CheckReport {
        checked: count,
        failures,
        allowed,
    };
    if report.passed() {
        Ok(report)
    } else {
        Err(ProtocolError::EntanglementRejected { failures, allowed })
    }
}

/// Alice's private commitment data plus the public revealed sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitmentRecord {
    pub bit: Bit,
    /// `d_1..d_n`
    pub outcomes: Vec<Outcome>,
    pub axes: Vec<Axis>,
    pub paulis: Vec<PauliOp>,
    /// `r_1..r_n`, each 0 or 1.
    pub revealed: Vec<u8>,
}

/// Symbols in direct order for bit 0 and reversed (`k ↔ n+1-k`) for bit 1.
pub fn reveal_order(bit: Bit, outcomes: &[Outcome]) -> Vec<u8> {
    let symbols = outcomes.iter().map(|o| o.symbol());
    match bit {
        Bit::Zero => symbols.collect(),
        Bit::One => symbols.rev().collect(),
    }
}

/// Alice measures every remaining pair along X or Z and reveals the results
/// in the order that encodes `bit`.
pub fn commit<R: Rng + ?Sized>(
    bit: Bit,
    reg: &mut PairRegister,
    rng: &mut R,
) -> Result<CommitmentRecord, ProtocolError> {
    if !(reg.is_scrambled(Side::Alice) && reg.is_scrambled(Side::Bob)) {
        return Err(ProtocolError::Precondition(
            "commit needs both scrambles first",
        ));
    }
    if !reg.is_renumbered() {
        return Err(ProtocolError::Precondition(
            "commit needs the surviving positions renumbered",
        ));
    }
    if reg.slots().iter().any(|s| s.alice_outcome.is_some()) {
        return Err(ProtocolError::Precondition("already committed"));
    }
    let n = reg.len();
    let mut outcomes = Vec::with_capacity(n);
    let mut axes = Vec::with_capacity(n);
    let mut paulis = Vec::with_capacity(n);
    for k in 0..n {
        let axis = Axis::random_xz(rng);
        let slot = reg.slot_mut(k);
        let (d, post) = slot.state.measure_spin(Side::Alice, axis, rng);
        slot.state = post;
        slot.alice_axis = Some(axis);
        slot.alice_outcome = Some(d);
        outcomes.push(d);
        axes.push(axis);
        paulis.push(slot.alice_pauli.unwrap_or(PauliOp::Id));
    }
    let revealed = reveal_order(bit, &outcomes);
    Ok(CommitmentRecord {
        bit,
        outcomes,
        axes,
        paulis,
        revealed,
    })
}

/// Unveil-time claim of Pauli choices, axes and bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disclosure {
    pub claimed_paulis: Vec<PauliOp>,
    pub claimed_axes: Vec<Axis>,
    pub claimed_bit: Bit,
}

/// The truthful disclosure of a commitment.
pub fn unveil(rec: &CommitmentRecord) -> Disclosure {
    Disclosure {
        claimed_paulis: rec.paulis.clone(),
        claimed_axes: rec.axes.clone(),
        claimed_bit: rec.bit,
    }
}

/// Positions where both parties applied the same Pauli, i.e. where the pair
/// is back to a singlet.
pub fn identify_singlets(
    alice_paulis: &[PauliOp],
    bob_paulis: &[PauliOp],
) -> Result<Vec<usize>, ProtocolError> {
    if alice_paulis.len() != bob_paulis.len() {
        return Err(ProtocolError::LengthMismatch {
            expected: bob_paulis.len(),
            got: alice_paulis.len(),
        });
    }
    Ok(alice_paulis
        .iter()
        .zip(bob_paulis)
        .enumerate()
        .filter_map(|(k, (a, b))| (a == b).then_some(k))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    EmptySingletSet,
    ThresholdFail,
    /// Both orders look anti-correlated.
    Ambiguous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Bit0,
    Bit1,
    Abort(AbortReason),
}

impl Decision {
    pub fn bit(self) -> Option<Bit> {
        match self {
            Decision::Bit0 => Some(Bit::Zero),
            Decision::Bit1 => Some(Bit::One),
            Decision::Abort(_) => None,
        }
    }

    pub fn is_abort(self) -> bool {
        matches!(self, Decision::Abort(_))
    }

    fn accept(bit: Bit) -> Decision {
        match bit {
            Bit::Zero => Decision::Bit0,
            Bit::One => Decision::Bit1,
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Bit0 => f.write_str("0"),
            Decision::Bit1 => f.write_str("1"),
            Decision::Abort(AbortReason::EmptySingletSet) => f.write_str("abort:empty_singlet_set"),
            Decision::Abort(AbortReason::ThresholdFail) => f.write_str("abort:threshold_fail"),
            Decision::Abort(AbortReason::Ambiguous) => f.write_str("abort:ambiguous"),
        }
    }
}

/// Bob's step-12 decision with its statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    /// Fraction of compared positions where Bob's symbol differs from `r_k`.
    pub f_direct: f64,
    /// Same against `r_{n+1-k}`.
    pub f_reverse: f64,
    pub singlet_count: usize,
    /// Singlet positions Bob could actually compare.
    pub compared: usize,
    pub anti_direct: usize,
    pub anti_reverse: usize,
}

/// Applies the threshold rule to anti-correlation counts.
pub fn decide(
    claimed_bit: Bit,
    anti_direct: usize,
    anti_reverse: usize,
    compared: usize,
    mode: VerdictMode,
    thresholds: &Thresholds,
) -> Decision {
    if compared == 0 {
        return Decision::Abort(AbortReason::EmptySingletSet);
    }
    let (claimed, other) = match claimed_bit {
        Bit::Zero => (anti_direct, anti_reverse),
        Bit::One => (anti_reverse, anti_direct),
    };
    if claimed < thresholds.min_pass_count(compared) {
        return Decision::Abort(AbortReason::ThresholdFail);
    }
    if mode == VerdictMode::DualOrder {
        let other_ok = thresholds
            .max_other_count(compared)
            .is_some_and(|max| other <= max);
        if !other_ok {
            return Decision::Abort(AbortReason::Ambiguous);
        }
    }
    Decision::accept(claimed_bit)
}

/// Bob finds the singlet positions from the disclosed and his own Paulis,
/// measures his particle there along the disclosed axes and compares
/// symbols with the revealed sequence in both orders.
///
/// A particle Bob already measured is reused when its axis matches the
/// disclosed one and skipped otherwise.
pub fn verify_commitment<R: Rng + ?Sized>(
    reg: &mut PairRegister,
    revealed: &[u8],
    disc: &Disclosure,
    bob_paulis: &[PauliOp],
    mode: VerdictMode,
    thresholds: &Thresholds,
    rng: &mut R,
) -> Result<Verdict, ProtocolError> {
    let n = reg.len();
    for got in [
        revealed.len(),
        disc.claimed_paulis.len(),
        disc.claimed_axes.len(),
        bob_paulis.len(),
    ] {
        if got != n {
            return Err(ProtocolError::LengthMismatch { expected: n, got });
        }
    }
    let singlets = identify_singlets(&disc.claimed_paulis, bob_paulis)?;
    let (mut anti_direct, mut anti_reverse, mut compared) = (0, 0, 0);
    for &k in &singlets {
        let axis = disc.claimed_axes[k];
        let slot = reg.slot_mut(k);
        let outcome = match (slot.bob_axis, slot.bob_outcome) {
            (Some(done), Some(o)) if done.same_as(&axis) => o,
            (Some(_), Some(_)) => continue,
            _ => {
                let (o, post) = slot.state.measure_spin(Side::Bob, axis, rng);
                slot.state = post;
                slot.bob_axis = Some(axis);
                slot.bob_outcome = Some(o);
                o
            }
        };
        let symbol = outcome.symbol();
        compared += 1;
        if symbol != revealed[k] {
            anti_direct += 1;
        }
        if symbol != revealed[n - 1 - k] {
            anti_reverse += 1;
        }
    }
    let frac = |x: usize| {
        if compared == 0 {
            0.0
        } else {
            x as f64 / compared as f64
        }
    };
    Ok(Verdict {
        decision: decide(
            disc.claimed_bit,
            anti_direct,
            anti_reverse,
            compared,
            mode,
            thresholds,
        ),
        f_direct: frac(anti_direct),
        f_reverse: frac(anti_reverse),
        singlet_count: singlets.len(),
        compared,
        anti_direct,
        anti_reverse,
    })
}

//! Serializable reports for single sessions.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::protocol::{
    coin_outcome, Bit, CheckReport, CoinOutcome, ProtocolConfig, ProtocolError, Session,
    Thresholds, Transcript,
};

/// Version of the report layouts ([`RunReport`], `BiasReport`).
pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    pub phase: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub allowed: usize,
}

impl PhaseResult {
    fn from_check(phase: &str, rep: &CheckReport) -> PhaseResult {
        PhaseResult {
            phase: phase.to_string(),
            passed: rep.passed(),
            checked: rep.checked,
            failures: rep.failures,
            allowed: rep.allowed,
        }
    }
}

/// One honest session. Config and seed are enough to reproduce it; only
/// `wall_clock_ms` varies between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub seed: u64,
    pub config: ProtocolConfig,
    pub thresholds: Thresholds,
    pub bit: Bit,
    pub phases: Vec<PhaseResult>,
    pub singlet_count: Option<usize>,
    pub compared: Option<usize>,
    pub f_direct: Option<f64>,
    pub f_reverse: Option<f64>,
    /// `"0"`, `"1"` or `"abort:<reason>"`.
    pub verdict: String,
    /// The verdict equals the committed bit.
    pub success: bool,
    pub guess: Option<Bit>,
    pub coin_outcome: Option<CoinOutcome>,
    pub wall_clock_ms: f64,
}

impl RunReport {
    /// Runs one honest session committing `bit`. With a `guess` the session
    /// is played as a coin toss. Check rejections end up in the report, not
    /// in the error.
    pub fn execute(
        cfg: &ProtocolConfig,
        bit: Bit,
        guess: Option<Bit>,
    ) -> Result<(RunReport, Transcript), ProtocolError> {
        let start = Instant::now();
        let mut s = Session::new(cfg.clone())?;
        let rejected = match play_honest(&mut s, bit, guess) {
            Ok(()) => None,
            Err(ProtocolError::SourceRejected { .. }) => Some("abort:source_rejected"),
            Err(ProtocolError::EntanglementRejected { .. }) => Some("abort:entanglement_rejected"),
            Err(e) => return Err(e),
        };
        let mut phases = Vec::new();
        if let Some(rep) = s.source_report() {
            phases.push(PhaseResult::from_check("source_check", rep));
        }
        if let Some(rep) = s.entanglement_report() {
            phases.push(PhaseResult::from_check("entanglement_check", rep));
        }
        let verdict = s.verdict();
        let decision = verdict.map(|v| v.decision);
        let report = RunReport {
            schema_version: SCHEMA_VERSION.to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            thresholds: s.thresholds(),
            bit,
            phases,
            singlet_count: verdict.map(|v| v.singlet_count),
            compared: verdict.map(|v| v.compared),
            f_direct: verdict.map(|v| v.f_direct),
            f_reverse: verdict.map(|v| v.f_reverse),
            verdict: match (rejected, decision) {
                (Some(r), _) => r.to_string(),
                (None, Some(d)) => d.to_string(),
                (None, None) => unreachable!("a finished session has a verdict"),
            },
            success: decision.and_then(|d| d.bit()) == Some(bit),
            guess,
            coin_outcome: guess.map(|g| match decision {
                Some(d) => coin_outcome(d, g),
                None => CoinOutcome::Abort,
            }),
            wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        Ok((report, s.transcript().clone()))
    }
}

fn play_honest(s: &mut Session, bit: Bit, guess: Option<Bit>) -> Result<(), ProtocolError> {
    use crate::protocol::{ScrambleMode, Unscramble};
    s.source_check()?;
    s.scramble_alice(ScrambleMode::Uniform)?;
    s.entanglement_check(Unscramble::Honest)?;
    s.scramble_bob(ScrambleMode::Uniform)?;
    s.commit(bit)?;
    if let Some(g) = guess {
        s.announce_guess(g)?;
    }
    s.unveil()?;
    s.verify()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_report() {
        let cfg = ProtocolConfig::default().with_seed(42);
        let (r, t) = RunReport::execute(&cfg, Bit::Zero, None).unwrap();
        assert_eq!(r.verdict, "0");
        assert!(r.success);
        assert_eq!(r.phases.len(), 2);
        assert!(r.phases.iter().all(|p| p.passed));
        assert_eq!(r.f_direct, Some(1.0));
        assert_eq!(r.coin_outcome, None);
        assert_eq!(t.len(), 8);
    }

    #[test]
    fn coin_report() {
        let cfg = ProtocolConfig::default().with_seed(1);
        let (r, t) = RunReport::execute(&cfg, Bit::One, Some(Bit::One)).unwrap();
        assert_eq!(r.coin_outcome, Some(CoinOutcome::One));
        assert_eq!(t.len(), 9);
        let (r, _) = RunReport::execute(&cfg, Bit::One, Some(Bit::Zero)).unwrap();
        assert_eq!(r.coin_outcome, Some(CoinOutcome::Zero));
    }

    #[test]
    fn identical_apart_from_timing() {
        let cfg = ProtocolConfig::default().with_seed(3);
        let (mut a, _) = RunReport::execute(&cfg, Bit::One, None).unwrap();
        let (mut b, _) = RunReport::execute(&cfg, Bit::One, None).unwrap();
        a.wall_clock_ms = 0.0;
        b.wall_clock_ms = 0.0;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}

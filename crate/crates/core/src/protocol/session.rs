use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ProtocolConfig, Thresholds};
use super::register::PairRegister;
use super::steps::{
    self, CheckReport, CommitmentRecord, Disclosure, ScrambleMode, Unscramble, Verdict,
};
use super::transcript::{Sender, Transcript};
use super::{Bit, ProtocolError};
use crate::noise;
use crate::qsim::{Axis, Outcome, PairState, PauliOp, Side, Sides};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Prepared,
    SourceChecked,
    AliceScrambled,
    EntanglementChecked,
    BobScrambled,
    Committed,
    Unveiled,
    Finished,
    Aborted,
}

/// One commitment session between Alice and Bob.
///
/// Every step checks the current phase before touching anything, so a call
/// out of order returns [`ProtocolError::WrongPhase`] and leaves the session
/// as it was. A failed entanglement check moves it to [`Phase::Aborted`].
#[derive(Clone, Debug)]
pub struct Session {
    cfg: ProtocolConfig,
    thresholds: Thresholds,
    rng: ChaCha8Rng,
    reg: PairRegister,
    phase: Phase,
    cheating: [bool; 2],
    source_report: Option<CheckReport>,
    entanglement_report: Option<CheckReport>,
    commitment: Option<CommitmentRecord>,
    guess: Option<Bit>,
    disclosure: Option<Disclosure>,
    verdict: Option<Verdict>,
    transcript: Transcript,
}

/// What Alice may look at after committing: her own records.
pub struct AliceView<'a> {
    record: &'a CommitmentRecord,
    rng: &'a mut ChaCha8Rng,
}

impl AliceView<'_> {
    pub fn record(&self) -> &CommitmentRecord {
        self.record
    }

    pub fn n(&self) -> usize {
        self.record.revealed.len()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        self.rng
    }
}

/// What Bob may look at and do between commitment and unveil: the revealed
/// sequence, his own Pauli record and measurements on his own particles.
pub struct BobView<'a> {
    reg: &'a mut PairRegister,
    revealed: &'a [u8],
    rng: &'a mut ChaCha8Rng,
}

impl BobView<'_> {
    pub fn n(&self) -> usize {
        self.revealed.len()
    }

    pub fn revealed(&self) -> &[u8] {
        self.revealed
    }

    pub fn own_paulis(&self) -> Vec<PauliOp> {
        self.reg
            .slots()
            .iter()
            .map(|s| s.bob_pauli.unwrap_or(PauliOp::Id))
            .collect()
    }

    /// Measures Bob's particle at position `k`. A particle can be measured
    /// once; the result is kept and reused at verification when the
    /// disclosed axis matches.
    pub fn measure_own(&mut self, k: usize, axis: Axis) -> Result<Outcome, ProtocolError> {
        if k >= self.reg.len() {
            return Err(ProtocolError::LengthMismatch {
                expected: self.reg.len(),
                got: k + 1,
            });
        }
        let slot = self.reg.slot_mut(k);
        if slot.bob_outcome.is_some() {
            return Err(ProtocolError::Precondition("particle already measured"));
        }
        let (o, post) = slot.state.measure_spin(Side::Bob, axis, self.rng);
        slot.state = post;
        slot.bob_axis = Some(axis);
        slot.bob_outcome = Some(o);
        Ok(o)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        self.rng
    }
}

fn env_pair(env_a: f64, env_b: f64, s: PairState) -> PairState {
    s.depolarize(Sides::Alice, env_a)
        .and_then(|s| s.depolarize(Sides::Bob, env_b))
        .expect("validated levels")
}

impl Session {
    /// Fresh session seeded from `cfg.seed`.
    pub fn new(cfg: ProtocolConfig) -> Result<Session, ProtocolError> {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Session::with_rng(cfg, rng)
    }

    /// Session drawing from an existing stream; the source emits singlets.
    pub fn with_rng(cfg: ProtocolConfig, rng: ChaCha8Rng) -> Result<Session, ProtocolError> {
        let states = vec![PairState::singlet(); cfg.total_pairs];
        Session::with_source(cfg, states, rng)
    }

    /// Session whose source emits the given pairs instead of singlets.
    /// Environmental noise still applies.
    pub fn with_source(
        cfg: ProtocolConfig,
        states: Vec<PairState>,
        rng: ChaCha8Rng,
    ) -> Result<Session, ProtocolError> {
        cfg.validate()?;
        if states.len() != cfg.total_pairs {
            return Err(ProtocolError::LengthMismatch {
                expected: cfg.total_pairs,
                got: states.len(),
            });
        }
        let (ea, eb) = (cfg.noise.env_a, cfg.noise.env_b);
        let reg = PairRegister::from_states(states.into_iter().map(|s| env_pair(ea, eb, s)));
        Ok(Session {
            thresholds: cfg.thresholds(),
            cfg,
            rng,
            reg,
            phase: Phase::Prepared,
            cheating: [false; 2],
            source_report: None,
            entanglement_report: None,
            commitment: None,
            guess: None,
            disclosure: None,
            verdict: None,
            transcript: Transcript::default(),
        })
    }

    /// A cheating party's self-injected noise is scaled down by the
    /// budget's detector advantage.
    pub fn set_cheating(&mut self, side: Side, cheating: bool) {
        self.cheating[side as usize] = cheating;
    }

    fn expect(&self, op: &'static str, phase: Phase) -> Result<(), ProtocolError> {
        if self.phase == phase {
            Ok(())
        } else {
            Err(ProtocolError::WrongPhase {
                op,
                phase: self.phase,
            })
        }
    }

    /// Alice tests `n_a` pairs of her source.
    pub fn source_check(&mut self) -> Result<CheckReport, ProtocolError> {
        self.expect("source_check", Phase::Prepared)?;
        let allowed = steps::allowed_failures(
            self.cfg.alice_checks,
            self.cfg.noise.at_source_check() / 2.0,
        );
        match steps::alice_source_check(
            &mut self.reg,
            self.cfg.alice_checks,
            &self.cfg.axis_policy,
            allowed,
            &mut self.rng,
        ) {
            Ok(rep) => {
                self.source_report = Some(rep);
                self.phase = Phase::SourceChecked;
                Ok(rep)
            }
            Err(e) => {
                if let ProtocolError::SourceRejected { failures, allowed } = e {
                    self.source_report = Some(CheckReport {
                        checked: self.cfg.alice_checks,
                        failures,
                        allowed,
                    });
                }
                self.phase = Phase::Aborted;
                Err(e)
            }
        }
    }

    /// Alice trusts her source without testing it. The `n_a` positions are
    /// still set aside so the commitment length is unchanged.
    pub fn skip_source_check(&mut self) -> Result<(), ProtocolError> {
        self.expect("skip_source_check", Phase::Prepared)?;
        let open = self.reg.unconsumed();
        for &k in open.iter().take(self.cfg.alice_checks) {
            self.reg.slot_mut(k).consumed = true;
        }
        self.phase = Phase::SourceChecked;
        Ok(())
    }

    /// Alice applies her Paulis, injects her noise and sends Bob his halves.
    pub fn scramble_alice(&mut self, mode: ScrambleMode) -> Result<(), ProtocolError> {
        self.expect("scramble_alice", Phase::SourceChecked)?;
        steps::scramble(&mut self.reg, Side::Alice, mode, &mut self.rng)?;
        let level = self.cfg.noise.applied_self(Side::Alice, self.cheating[0]);
        noise::inject_noise(&mut self.reg, Side::Alice, level)?;
        self.transcript.push(
            "scramble_alice",
            Sender::Alice,
            "send_particles",
            &self.reg.unconsumed_count(),
        );
        self.phase = Phase::AliceScrambled;
        Ok(())
    }

    /// Bob checks `n_b` pairs; Alice first undoes her Pauli on them or not.
    pub fn entanglement_check(
        &mut self,
        unscramble: Unscramble,
    ) -> Result<CheckReport, ProtocolError> {
        self.expect("entanglement_check", Phase::AliceScrambled)?;
        let allowed = steps::allowed_failures(
            self.cfg.bob_checks,
            self.cfg.noise.at_entanglement_check() / 2.0,
        );
        self.transcript.push(
            "entanglement_check",
            Sender::Bob,
            "request_check",
            &self.cfg.bob_checks,
        );
        self.transcript.push(
            "entanglement_check",
            Sender::Alice,
            "send_check_particles",
            &self.cfg.bob_checks,
        );
        let res = steps::bob_entanglement_check(
            &mut self.reg,
            self.cfg.bob_checks,
            unscramble,
            &self.cfg.axis_policy,
            allowed,
            &mut self.rng,
        );
        match res {
            Ok(rep) => {
                self.transcript
                    .push("entanglement_check", Sender::Bob, "check_passed", &rep);
                self.entanglement_report = Some(rep);
                self.phase = Phase::EntanglementChecked;
                Ok(rep)
            }
            Err(e) => {
                if let ProtocolError::EntanglementRejected { failures, allowed } = e {
                    let rep = CheckReport {
                        checked: self.cfg.bob_checks,
                        failures,
                        allowed,
                    };
                    self.transcript
                        .push("entanglement_check", Sender::Bob, "check_failed", &rep);
                    self.entanglement_report = Some(rep);
                }
                self.phase = Phase::Aborted;
                Err(e)
            }
        }
    }

    /// Bob applies his Paulis and noise; the surviving positions are then
    /// renumbered `0..n`.
    pub fn scramble_bob(&mut self, mode: ScrambleMode) -> Result<(), ProtocolError> {
        self.expect("scramble_bob", Phase::EntanglementChecked)?;
        steps::scramble(&mut self.reg, Side::Bob, mode, &mut self.rng)?;
        let level = self.cfg.noise.applied_self(Side::Bob, self.cheating[1]);
        noise::inject_noise(&mut self.reg, Side::Bob, level)?;
        self.reg.renumber();
        self.transcript
            .push("scramble_bob", Sender::Bob, "scrambled", &self.reg.len());
        self.phase = Phase::BobScrambled;
        Ok(())
    }

    /// Alice measures and reveals. Returns the revealed symbols.
    pub fn commit(&mut self, bit: Bit) -> Result<&[u8], ProtocolError> {
        self.expect("commit", Phase::BobScrambled)?;
        let rec = steps::commit(bit, &mut self.reg, &mut self.rng)?;
        self.transcript
            .push("commit", Sender::Alice, "revealed", &rec.revealed);
        self.phase = Phase::Committed;
        Ok(&self.commitment.insert(rec).revealed)
    }

    pub fn alice_view(&mut self) -> Result<AliceView<'_>, ProtocolError> {
        self.expect("alice_view", Phase::Committed)?;
        Ok(AliceView {
            record: self.commitment.as_ref().expect("committed"),
            rng: &mut self.rng,
        })
    }

    pub fn bob_view(&mut self) -> Result<BobView<'_>, ProtocolError> {
        self.expect("bob_view", Phase::Committed)?;
        Ok(BobView {
            reg: &mut self.reg,
            revealed: &self.commitment.as_ref().expect("committed").revealed,
            rng: &mut self.rng,
        })
    }

    /// Bob announces his guess of the committed bit (coin toss only).
    pub fn announce_guess(&mut self, guess: Bit) -> Result<(), ProtocolError> {
        self.expect("announce_guess", Phase::Committed)?;
        if self.guess.is_some() {
            return Err(ProtocolError::Precondition("guess already announced"));
        }
        self.transcript.push("guess", Sender::Bob, "guess", &guess);
        self.guess = Some(guess);
        Ok(())
    }

    /// Truthful disclosure.
    pub fn unveil(&mut self) -> Result<&Disclosure, ProtocolError> {
        self.expect("unveil", Phase::Committed)?;
        let disc = steps::unveil(self.commitment.as_ref().expect("committed"));
        Ok(self.disclose(disc))
    }

    /// Replaces the truthful disclosure with an arbitrary claim.
    pub fn unveil_forged(&mut self, disc: Disclosure) -> Result<&Disclosure, ProtocolError> {
        self.expect("unveil_forged", Phase::Committed)?;
        let n = self.reg.len();
        for got in [disc.claimed_paulis.len(), disc.claimed_axes.len()] {
            if got != n {
                return Err(ProtocolError::LengthMismatch { expected: n, got });
            }
        }
        Ok(self.disclose(disc))
    }

    fn disclose(&mut self, disc: Disclosure) -> &Disclosure {
        self.transcript
            .push("unveil", Sender::Alice, "disclosure", &disc);
        self.phase = Phase::Unveiled;
        self.disclosure.insert(disc)
    }

    /// Bob's decision. An abort verdict still finishes the session.
    pub fn verify(&mut self) -> Result<&Verdict, ProtocolError> {
        self.expect("verify", Phase::Unveiled)?;
        let rec = self.commitment.as_ref().expect("committed");
        let disc = self.disclosure.as_ref().expect("unveiled");
        let bob = self
            .reg
            .slots()
            .iter()
            .map(|s| s.bob_pauli.unwrap_or(PauliOp::Id))
            .collect::<Vec<_>>();
        let verdict = steps::verify_commitment(
            &mut self.reg,
            &rec.revealed,
            disc,
            &bob,
            self.cfg.verdict_mode,
            &self.thresholds,
            &mut self.rng,
        )?;
        self.transcript.push(
            "verify",
            Sender::Bob,
            "verdict",
            &verdict.decision.to_string(),
        );
        self.phase = Phase::Finished;
        Ok(self.verdict.insert(verdict))
    }

    /// Runs every step honestly and returns Bob's verdict.
    pub fn run_honest(&mut self, bit: Bit) -> Result<Verdict, ProtocolError> {
        self.source_check()?;
        self.scramble_alice(ScrambleMode::Uniform)?;
        self.entanglement_check(Unscramble::Honest)?;
        self.scramble_bob(ScrambleMode::Uniform)?;
        self.commit(bit)?;
        self.unveil()?;
        self.verify().cloned()
    }

    /// The session's random stream, for a party's private choices (the
    /// committed bit, a guess).
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.cfg
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds
    }

    /// Full simulator state, for analysis and tests. Parties never see this.
    pub fn register(&self) -> &PairRegister {
        &self.reg
    }

    pub fn source_report(&self) -> Option<&CheckReport> {
        self.source_report.as_ref()
    }

    pub fn entanglement_report(&self) -> Option<&CheckReport> {
        self.entanglement_report.as_ref()
    }

    pub fn commitment(&self) -> Option<&CommitmentRecord> {
        self.commitment.as_ref()
    }

    pub fn guess(&self) -> Option<Bit> {
        self.guess
    }

    pub fn disclosure(&self) -> Option<&Disclosure> {
        self.disclosure.as_ref()
    }

    pub fn verdict(&self) -> Option<&Verdict> {
        self.verdict.as_ref()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::attacks::{
    alice_product_source, alice_reversal_no_suppression, alice_wrong_disclosure, bob_early_measure,
    EarlyGuess,
};
use super::{AliceStrategy, BobStrategy, Game, Scenario};
use crate::protocol::{
    coin_outcome, Bit, CoinOutcome, ProtocolConfig, ProtocolError, ScrambleMode, Session,
    Unscramble, Verdict,
};
use crate::qsim::Side;

/// Where a run stopped before verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejected {
    Source,
    Entanglement,
}

/// Everything observed in one adversarial run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub outcome: CoinOutcome,
    pub rejected: Option<Rejected>,
    pub committed: Option<Bit>,
    /// Bit named in the disclosure Bob verified.
    pub claimed: Option<Bit>,
    pub guess: Option<Bit>,
    pub early: Option<EarlyGuess>,
    pub flip_attempted: bool,
    pub flip_succeeded: bool,
    /// The forgery could not be built and Alice unveiled honestly.
    pub insufficient_positions: bool,
    pub verdict: Option<Verdict>,
}

impl Trial {
    fn rejected(stage: Rejected) -> Trial {
        Trial {
            outcome: CoinOutcome::Abort,
            rejected: Some(stage),
            committed: None,
            claimed: None,
            guess: None,
            early: None,
            flip_attempted: false,
            flip_succeeded: false,
            insufficient_positions: false,
            verdict: None,
        }
    }
}

fn mode(scrambles: bool) -> ScrambleMode {
    if scrambles {
        ScrambleMode::Uniform
    } else {
        ScrambleMode::Skip
    }
}

/// One coin toss (or forced flip) between the given strategies, drawing
/// all randomness from `rng`.
pub fn play(
    scenario: &Scenario,
    cfg: &ProtocolConfig,
    rng: ChaCha8Rng,
) -> Result<Trial, ProtocolError> {
    let mut s = match scenario.alice {
        AliceStrategy::ProductStateSource => {
            Session::with_source(cfg.clone(), alice_product_source(cfg), rng)?
        }
        _ => Session::with_rng(cfg.clone(), rng)?,
    };
    s.set_cheating(Side::Alice, scenario.alice_cheats());
    s.set_cheating(Side::Bob, scenario.bob_cheats());

    if scenario.alice == AliceStrategy::ProductStateSource {
        s.skip_source_check()?;
    } else {
        match s.source_check() {
            Err(ProtocolError::SourceRejected { .. }) => {
                return Ok(Trial::rejected(Rejected::Source))
            }
            other => {
                other?;
            }
        }
    }
    s.scramble_alice(mode(scenario.alice_scrambles()))?;
    match s.entanglement_check(Unscramble::Honest) {
        Err(ProtocolError::EntanglementRejected { .. }) => {
            return Ok(Trial::rejected(Rejected::Entanglement))
        }
        other => {
            other?;
        }
    }
    s.scramble_bob(mode(scenario.bob_scrambles()))?;

    let bit = Bit::random(s.rng());
    s.commit(bit)?;

    let (guess, early) = match scenario.bob {
        BobStrategy::HonestGuess => (Bit::random(s.rng()), None),
        BobStrategy::EarlyMeasure | BobStrategy::NoSuppressEarlyMeasure => {
            let g = bob_early_measure(&mut s.bob_view()?)?;
            (g.guess, Some(g))
        }
    };
    s.announce_guess(guess)?;

    let attempt = scenario.alice_forges()
        && match scenario.game {
            Game::CoinToss => guess == bit,
            Game::ForcedFlip => true,
        };
    let target = bit.flip();
    let mut insufficient = false;
    let mut claimed = bit;
    if attempt {
        let mut view = s.alice_view()?;
        let forged = match scenario.alice {
            AliceStrategy::WrongDisclosure => {
                Some(alice_wrong_disclosure(&mut view, target, scenario.forgery))
            }
            AliceStrategy::ReversalNoSuppression => {
                match alice_reversal_no_suppression(&mut view, target) {
                    Ok(d) => Some(d),
                    Err(ProtocolError::InsufficientPositions { .. }) => {
                        insufficient = true;
                        None
                    }
                    Err(e) => return Err(e),
                }
            }
            _ => unreachable!("only forging strategies attempt"),
        };
        match forged {
            Some(d) => {
                claimed = d.claimed_bit;
                s.unveil_forged(d)?
            }
            None => s.unveil()?,
        };
    } else {
        s.unveil()?;
    }
    let verdict = s.verify()?.clone();
    Ok(Trial {
        outcome: coin_outcome(verdict.decision, guess),
        rejected: None,
        committed: Some(bit),
        claimed: Some(claimed),
        guess: Some(guess),
        early,
        flip_attempted: attempt,
        flip_succeeded: attempt && verdict.decision.bit() == Some(target),
        insufficient_positions: insufficient,
        verdict: Some(verdict),
    })
}

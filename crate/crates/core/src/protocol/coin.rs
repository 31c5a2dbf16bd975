use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ProtocolConfig;
use super::session::Session;
use super::steps::{Decision, ScrambleMode, Unscramble};
use super::{Bit, ProtocolError};

/// Result of one coin toss. Outcome 1 means Bob guessed the verified bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinOutcome {
    One,
    Zero,
    Abort,
}

impl std::fmt::Display for CoinOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoinOutcome::One => "1",
            CoinOutcome::Zero => "0",
            CoinOutcome::Abort => "abort",
        })
    }
}

pub fn coin_outcome(decision: Decision, guess: Bit) -> CoinOutcome {
    match decision.bit() {
        Some(b) if b == guess => CoinOutcome::One,
        Some(_) => CoinOutcome::Zero,
        None => CoinOutcome::Abort,
    }
}

/// Honest coin toss: Alice commits a random bit, Bob announces a random
/// guess, Alice unveils, Bob verifies. Check rejections count as aborts.
pub fn coin_toss(cfg: &ProtocolConfig, rng: ChaCha8Rng) -> Result<CoinOutcome, ProtocolError> {
    let mut s = Session::with_rng(cfg.clone(), rng)?;
    let steps = (|| {
        s.source_check()?;
        s.scramble_alice(ScrambleMode::Uniform)?;
        s.entanglement_check(Unscramble::Honest)?;
        s.scramble_bob(ScrambleMode::Uniform)?;
        let bit = Bit::random(s.rng());
        s.commit(bit)?;
        let guess = Bit::random(s.bob_view()?.rng());
        s.announce_guess(guess)?;
        s.unveil()?;
        Ok::<_, ProtocolError>((s.verify()?.decision, guess))
    })();
    match steps {
        Ok((decision, guess)) => Ok(coin_outcome(decision, guess)),
        Err(e) if e.is_rejection() => Ok(CoinOutcome::Abort),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::AbortReason;
    use rand::SeedableRng;

    #[test]
    fn outcome_rule() {
        assert_eq!(coin_outcome(Decision::Bit0, Bit::Zero), CoinOutcome::One);
        assert_eq!(coin_outcome(Decision::Bit1, Bit::Zero), CoinOutcome::Zero);
        assert_eq!(
            coin_outcome(Decision::Abort(AbortReason::Ambiguous), Bit::One),
            CoinOutcome::Abort
        );
    }

    #[test]
    fn honest_toss_never_aborts() {
        let cfg = ProtocolConfig::default();
        for seed in 0..20 {
            let out = coin_toss(&cfg, ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_ne!(out, CoinOutcome::Abort);
        }
    }
}

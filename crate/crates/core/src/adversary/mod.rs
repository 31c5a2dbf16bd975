//! Cheating strategies and Monte Carlo estimates of coin bias.
//!
//! Every attack acts through a session view, so a party only ever uses its
//! own records and the messages it received. Skipping suppression is
//! modelled as a party not scrambling its own particles.

mod attacks;
mod bias;
mod trial;

pub use attacks::{
    alice_product_source, alice_reversal_no_suppression, alice_wrong_disclosure, bob_early_measure,
    EarlyGuess,
};
pub use bias::{estimate_bias, run_stream, BiasReport, EarlyStats, Rejections, MIN_RUNS};
pub use trial::{play, Rejected, Trial};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliceStrategy {
    Honest,
    /// Forges the unveil data to claim the other bit.
    WrongDisclosure,
    /// Skips her scramble, predicts Bob's results from unscrambled
    /// singlets and steers the singlet set to claim the other bit.
    #[serde(rename = "reversal")]
    ReversalNoSuppression,
    /// Sends Z-basis product pairs instead of singlets.
    #[serde(rename = "product-source")]
    ProductStateSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobStrategy {
    #[serde(rename = "honest")]
    HonestGuess,
    /// Measures his particles along random X/Z axes before unveil and
    /// guesses from the revealed sequence.
    EarlyMeasure,
    /// Early measurement without applying his own scramble.
    #[serde(rename = "no-suppress-early-measure")]
    NoSuppressEarlyMeasure,
}

/// How a wrong disclosure is built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Forgery {
    /// Uniformly random claimed Paulis, true axes: relocates the claimed
    /// singlet set at random.
    #[default]
    Relocate,
    /// True Paulis, every axis swapped between X and Z.
    AxisLie,
    /// Claimed Paulis chosen per position so that, wherever the claim
    /// happens to match Bob's Pauli, the resulting Bell state correlates
    /// Bob's result with the reversed sequence.
    Steered,
}

/// Which parties apply their random Paulis (when their strategy lets them).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suppression {
    #[default]
    Both,
    AliceOnly,
    BobOnly,
    None,
}

impl Suppression {
    pub fn alice(self) -> bool {
        matches!(self, Suppression::Both | Suppression::AliceOnly)
    }

    pub fn bob(self) -> bool {
        matches!(self, Suppression::Both | Suppression::BobOnly)
    }
}

/// Whether Alice tries to change her bit only when Bob guessed it (the coin
/// toss) or in every run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Game {
    #[default]
    CoinToss,
    ForcedFlip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub alice: AliceStrategy,
    pub bob: BobStrategy,
    pub suppression: Suppression,
    pub forgery: Forgery,
    pub game: Game,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            alice: AliceStrategy::Honest,
            bob: BobStrategy::HonestGuess,
            suppression: Suppression::Both,
            forgery: Forgery::Relocate,
            game: Game::CoinToss,
        }
    }
}

impl Scenario {
    pub fn new(alice: AliceStrategy, bob: BobStrategy) -> Scenario {
        Scenario {
            alice,
            bob,
            ..Scenario::default()
        }
    }

    pub fn with_suppression(mut self, s: Suppression) -> Self {
        self.suppression = s;
        self
    }

    pub fn with_forgery(mut self, f: Forgery) -> Self {
        self.forgery = f;
        self
    }

    pub fn with_game(mut self, g: Game) -> Self {
        self.game = g;
        self
    }

    pub fn alice_scrambles(&self) -> bool {
        self.suppression.alice() && self.alice != AliceStrategy::ReversalNoSuppression
    }

    pub fn bob_scrambles(&self) -> bool {
        self.suppression.bob() && self.bob != BobStrategy::NoSuppressEarlyMeasure
    }

    pub fn alice_cheats(&self) -> bool {
        self.alice != AliceStrategy::Honest
    }

    pub fn bob_cheats(&self) -> bool {
        self.bob != BobStrategy::HonestGuess
    }

    fn alice_forges(&self) -> bool {
        matches!(
            self.alice,
            AliceStrategy::WrongDisclosure | AliceStrategy::ReversalNoSuppression
        )
    }
}

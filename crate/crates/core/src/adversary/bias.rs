use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{play, Rejected, Trial};
use super::Scenario;
use crate::protocol::{Bit, CoinOutcome, ProtocolConfig, ProtocolError, Thresholds};
use crate::report::SCHEMA_VERSION;
use crate::stats::Estimate;

pub const MIN_RUNS: u64 = 100;

/// Stream for run `index` of a batch seeded with `seed`. Independent of how
/// runs are spread over threads.
pub fn run_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Integer tallies; merging is exact and order-independent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    runs: u64,
    ones: u64,
    zeros: u64,
    aborts: u64,
    source_rejected: u64,
    entanglement_rejected: u64,
    insufficient: u64,
    guesses: u64,
    correct_guesses: u64,
    flip_attempts: u64,
    flip_successes: u64,
    flip_aborts: u64,
    verified: u64,
    singlets: u64,
    compared: u64,
    anti_claimed: u64,
    anti_other: u64,
    early_measured: u64,
    early_anti_committed: u64,
    early_anti_other: u64,
}

impl Tally {
    fn from_trial(t: &Trial) -> Tally {
        let mut x = Tally {
            runs: 1,
            ..Tally::default()
        };
        match t.outcome {
            CoinOutcome::One => x.ones = 1,
            CoinOutcome::Zero => x.zeros = 1,
            CoinOutcome::Abort => x.aborts = 1,
        }
        match t.rejected {
            Some(Rejected::Source) => x.source_rejected = 1,
            Some(Rejected::Entanglement) => x.entanglement_rejected = 1,
            None => {}
        }
        x.insufficient = t.insufficient_positions as u64;
        if let (Some(g), Some(b)) = (t.guess, t.committed) {
            x.guesses = 1;
            x.correct_guesses = (g == b) as u64;
        }
        if t.flip_attempted {
            x.flip_attempts = 1;
            x.flip_successes = t.flip_succeeded as u64;
            x.flip_aborts = (t.outcome == CoinOutcome::Abort) as u64;
        }
        if let (Some(v), Some(claimed)) = (&t.verdict, t.claimed) {
            x.verified = 1;
            x.singlets = v.singlet_count as u64;
            x.compared = v.compared as u64;
            let (c, o) = match claimed {
                Bit::Zero => (v.anti_direct, v.anti_reverse),
                Bit::One => (v.anti_reverse, v.anti_direct),
            };
            x.anti_claimed = c as u64;
            x.anti_other = o as u64;
        }
        if let (Some(e), Some(b)) = (t.early, t.committed) {
            x.early_measured = e.measured as u64;
            x.early_anti_committed = e.anti_for(b) as u64;
            x.early_anti_other = e.anti_for(b.flip()) as u64;
        }
        x
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            runs: self.runs + o.runs,
            ones: self.ones + o.ones,
            zeros: self.zeros + o.zeros,
            aborts: self.aborts + o.aborts,
            source_rejected: self.source_rejected + o.source_rejected,
            entanglement_rejected: self.entanglement_rejected + o.entanglement_rejected,
            insufficient: self.insufficient + o.insufficient,
            guesses: self.guesses + o.guesses,
            correct_guesses: self.correct_guesses + o.correct_guesses,
            flip_attempts: self.flip_attempts + o.flip_attempts,
            flip_successes: self.flip_successes + o.flip_successes,
            flip_aborts: self.flip_aborts + o.flip_aborts,
            verified: self.verified + o.verified,
            singlets: self.singlets + o.singlets,
            compared: self.compared + o.compared,
            anti_claimed: self.anti_claimed + o.anti_claimed,
            anti_other: self.anti_other + o.anti_other,
            early_measured: self.early_measured + o.early_measured,
            early_anti_committed: self.early_anti_committed + o.early_anti_committed,
            early_anti_other: self.early_anti_other + o.early_anti_other,
        }
    }
}

/// Anti-correlation seen by Bob's early measurement, pooled over all
/// measured positions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarlyStats {
    pub committed_order: Estimate,
    pub other_order: Estimate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejections {
    pub source: u64,
    pub entanglement: u64,
    /// Reversal attempts abandoned for lack of usable positions.
    pub insufficient_positions: u64,
}

/// Monte Carlo estimate of both parties' coin bias for one scenario.
///
/// Bob wants outcome 1 and Alice outcome 0, so `p_b + p_a + abort_rate = 1`.
/// The `_completed` variants condition on the toss not aborting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub schema_version: String,
    pub scenario: Scenario,
    pub config: ProtocolConfig,
    pub thresholds: Thresholds,
    pub runs: u64,
    pub p_a: Estimate,
    pub p_b: Estimate,
    pub epsilon_a: Estimate,
    pub epsilon_b: Estimate,
    pub abort_rate: Estimate,
    pub p_a_completed: Estimate,
    pub p_b_completed: Estimate,
    /// How often Bob's announced guess matched the committed bit.
    pub guess_accuracy: Estimate,
    pub flip_success: Option<Estimate>,
    /// Fraction of flip attempts that ended in an abort.
    pub flip_abort_rate: Option<Estimate>,
    pub early: Option<EarlyStats>,
    pub rejections: Rejections,
    pub singlet_count_mean: f64,
    pub compared_mean: f64,
    /// Pooled fraction of compared positions anti-correlated in the order
    /// of the claimed bit.
    pub f_claimed: f64,
    pub f_other: f64,
}

fn shifted(e: Estimate) -> Estimate {
    Estimate {
        value: e.value - 0.5,
        ..e
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl BiasReport {
    fn from_tally(scenario: Scenario, cfg: &ProtocolConfig, t: Tally) -> BiasReport {
        let p_a = Estimate::from_counts(t.zeros, t.runs);
        let p_b = Estimate::from_counts(t.ones, t.runs);
        let completed = t.zeros + t.ones;
        BiasReport {
            schema_version: SCHEMA_VERSION.to_string(),
            scenario,
            config: cfg.clone(),
            thresholds: cfg.thresholds(),
            runs: t.runs,
            p_a,
            p_b,
            epsilon_a: shifted(p_a),
            epsilon_b: shifted(p_b),
            abort_rate: Estimate::from_counts(t.aborts, t.runs),
            p_a_completed: Estimate::from_counts(t.zeros, completed),
            p_b_completed: Estimate::from_counts(t.ones, completed),
            guess_accuracy: Estimate::from_counts(t.correct_guesses, t.guesses),
            flip_success: (t.flip_attempts > 0)
                .then(|| Estimate::from_counts(t.flip_successes, t.flip_attempts)),
            flip_abort_rate: (t.flip_attempts > 0)
                .then(|| Estimate::from_counts(t.flip_aborts, t.flip_attempts)),
            early: (t.early_measured > 0).then(|| EarlyStats {
                committed_order: Estimate::from_counts(t.early_anti_committed, t.early_measured),
                other_order: Estimate::from_counts(t.early_anti_other, t.early_measured),
            }),
            rejections: Rejections {
                source: t.source_rejected,
                entanglement: t.entanglement_rejected,
                insufficient_positions: t.insufficient,
            },
            singlet_count_mean: ratio(t.singlets, t.verified),
            compared_mean: ratio(t.compared, t.verified),
            f_claimed: ratio(t.anti_claimed, t.compared),
            f_other: ratio(t.anti_other, t.compared),
        }
    }
}

/// Plays `runs` independent tosses in parallel. Run `i` draws from
/// `run_stream(cfg.seed, i)`, so the report depends only on the inputs.
pub fn estimate_bias(
    scenario: Scenario,
    cfg: &ProtocolConfig,
    runs: u64,
) -> Result<BiasReport, ProtocolError> {
    if runs < MIN_RUNS {
        return Err(ProtocolError::Precondition(
            "estimate_bias needs at least 100 runs",
        ));
    }
    cfg.validate()?;
    let tally = (0..runs)
        .into_par_iter()
        .map(|i| play(&scenario, cfg, run_stream(cfg.seed, i)).map(|t| Tally::from_trial(&t)))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(BiasReport::from_tally(scenario, cfg, tally))
}

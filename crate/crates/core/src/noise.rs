//! Noise budgets, calibration, injection and recovery confidence.
//!
//! All noise is single-side depolarizing. Levels compose multiplicatively:
//! a singlet that went through levels `p1, p2, ...` (on either side) keeps
//! its singlet weight `Π(1 - p_i)` and shows anti-correlation `1 - p/2`
//! along any common axis, where `p = 1 - Π(1 - p_i)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{PairRegister, Thresholds, VerdictMode};
use crate::qsim::{Axis, PairState, Side, Sides};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("noise level {name} = {value} outside [0, 1]")]
    LevelOutOfRange { name: &'static str, value: f64 },
    #[error("calibration needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

/// Depolarizing levels for the environment and for deliberate injection.
///
/// `self_a`/`self_b` include both the level needed to suppress entanglement
/// and the extra level each party adds against better detectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseBudget {
    pub env_a: f64,
    pub env_b: f64,
    pub self_a: f64,
    pub self_b: f64,
    /// Fraction by which a cheating party can shrink its own injected level.
    pub detector_advantage: f64,
}

/// `1 - Π(1 - p_i)`
pub fn compose(levels: &[f64]) -> f64 {
    1.0 - levels.iter().map(|p| 1.0 - p).product::<f64>()
}

impl NoiseBudget {
    pub fn noiseless() -> NoiseBudget {
        NoiseBudget::default()
    }

    /// Environmental noise split evenly between the two sides so that the
    /// composed level equals `p_total`.
    pub fn symmetric_env(p_total: f64) -> NoiseBudget {
        let each = 1.0 - (1.0 - p_total.clamp(0.0, 1.0)).sqrt();
        NoiseBudget {
            env_a: each,
            env_b: each,
            ..NoiseBudget::default()
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, value) in [
            ("env_a", self.env_a),
            ("env_b", self.env_b),
            ("self_a", self.self_a),
            ("self_b", self.self_b),
            ("detector_advantage", self.detector_advantage),
        ] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(NoiseError::LevelOutOfRange { name, value });
            }
        }
        Ok(())
    }

    /// Effective level on every pair at commitment time.
    pub fn total(&self) -> f64 {
        compose(&[self.env_a, self.env_b, self.self_a, self.self_b])
    }

    /// Level seen by Alice's source check (environment only).
    pub fn at_source_check(&self) -> f64 {
        compose(&[self.env_a, self.env_b])
    }

    /// Level seen by Bob's entanglement check (after Alice's injection).
    pub fn at_entanglement_check(&self) -> f64 {
        compose(&[self.env_a, self.env_b, self.self_a])
    }

    /// Self-injected level actually applied by a party; a cheating party
    /// with a better detector gets away with less.
    pub fn applied_self(&self, side: Side, cheating: bool) -> f64 {
        let nominal = match side {
            Side::Alice => self.self_a,
            Side::Bob => self.self_b,
        };
        if cheating {
            nominal * (1.0 - self.detector_advantage)
        } else {
            nominal
        }
    }
}

/// Estimated depolarizing level for one noise component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    pub component: String,
    pub level: f64,
    pub failure_rate: f64,
    pub samples: usize,
    pub std_error: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub estimates: Vec<LevelEstimate>,
}

pub const MIN_CALIBRATION_SAMPLES: usize = 100;

/// Measures `samples` independent copies of `source` along common random
/// axes and inverts `anti-correlation = 1 - p/2`.
pub fn calibrate_environment<R: Rng + ?Sized>(
    component: &str,
    source: &PairState,
    samples: usize,
    rng: &mut R,
) -> Result<LevelEstimate, NoiseError> {
    if samples < MIN_CALIBRATION_SAMPLES {
        return Err(NoiseError::TooFewSamples {
            min: MIN_CALIBRATION_SAMPLES,
            got: samples,
        });
    }
    let mut failures = 0usize;
    for _ in 0..samples {
        let axis = Axis::random(rng);
        let (a, post) = source.measure_spin(Side::Alice, axis, rng);
        let (b, _) = post.measure_spin(Side::Bob, axis, rng);
        if a == b {
            failures += 1;
        }
    }
    let f = failures as f64 / samples as f64;
    Ok(LevelEstimate {
        component: component.to_string(),
        level: (2.0 * f).min(1.0),
        failure_rate: f,
        samples,
        std_error: 2.0 * stats::proportion_sigma(samples, f),
    })
}

/// Each party calibrates the environmental level on its own side.
pub fn calibrate_budget<R: Rng + ?Sized>(
    budget: &NoiseBudget,
    samples: usize,
    rng: &mut R,
) -> Result<CalibrationReport, NoiseError> {
    budget.validate()?;
    let singlet = PairState::singlet();
    let a_source = singlet
        .depolarize(Sides::Alice, budget.env_a)
        .expect("validated level");
    let b_source = singlet
        .depolarize(Sides::Bob, budget.env_b)
        .expect("validated level");
    Ok(CalibrationReport {
        estimates: vec![
            calibrate_environment("env_a", &a_source, samples, rng)?,
            calibrate_environment("env_b", &b_source, samples, rng)?,
        ],
    })
}

/// Depolarizes one side of every unconsumed position.
pub fn inject_noise(reg: &mut PairRegister, side: Side, level: f64) -> Result<(), NoiseError> {
    if !(0.0..=1.0).contains(&level) || level.is_nan() {
        return Err(NoiseError::LevelOutOfRange {
            name: "level",
            value: level,
        });
    }
    if level == 0.0 {
        return Ok(());
    }
    reg.map_unconsumed(|s| s.depolarize(side.into(), level).expect("validated level"));
    Ok(())
}

/// Exact probability that Bob's verdict recovers the committed bit when
/// `singlet_count` positions are compared, the committed order anti-correlates
/// with probability `1 - p_total/2` per position and the other order with ½.
///
/// The two orders are treated as independent for `DualOrder`.
pub fn recovery_confidence(
    singlet_count: usize,
    p_total: f64,
    thresholds: &Thresholds,
    mode: VerdictMode,
) -> f64 {
    if singlet_count == 0 {
        return 0.0;
    }
    let q = 1.0 - p_total / 2.0;
    let claimed =
        stats::binomial_tail_ge(singlet_count, q, thresholds.min_pass_count(singlet_count));
    match mode {
        VerdictMode::ClaimedOrder => claimed,
        VerdictMode::DualOrder => {
            let other_ok = match thresholds.max_other_count(singlet_count) {
                Some(k) => stats::binomial_cdf(singlet_count, 0.5, k),
                None => 0.0,
            };
            claimed * other_ok
        }
    }
}

/// `recovery_confidence` averaged over `Binomial(n, 1/4)` singlet counts.
pub fn expected_recovery_confidence(
    n: usize,
    p_total: f64,
    thresholds: &Thresholds,
    mode: VerdictMode,
) -> f64 {
    stats::binomial_pmf(n, 0.25)
        .iter()
        .enumerate()
        .map(|(m, w)| w * recovery_confidence(m, p_total, thresholds, mode))
        .sum()
}

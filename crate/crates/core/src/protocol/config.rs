use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::noise::{NoiseBudget, NoiseError};
use crate::qsim::Axis;

/// How the source check and the entanglement check pick measurement axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisPolicy {
    FixedSecret(Axis),
    /// A fresh X-or-Z choice per checked pair, shared by both particles.
    #[serde(rename = "random_xz")]
    RandomXZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictMode {
    /// Only the order matching the claimed bit is tested.
    #[serde(rename = "claimed", alias = "claimed_order")]
    ClaimedOrder,
    /// The claimed order must pass and the other order must not.
    #[serde(rename = "dual", alias = "dual_order")]
    DualOrder,
}

/// Step-12 acceptance thresholds on anti-correlation fractions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub hi: f64,
    pub lo: f64,
}

const COUNT_EPS: f64 = 1e-9;
const LO_GAP: f64 = 0.01;

impl Thresholds {
    pub fn new(hi: f64, lo: f64) -> Result<Thresholds, ConfigError> {
        let t = Thresholds { hi, lo };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0 <= self.lo && self.lo < self.hi && self.hi <= 1.0) {
            return Err(ConfigError::Thresholds {
                hi: self.hi,
                lo: self.lo,
            });
        }
        Ok(())
    }

    /// Defaults for a calibrated total depolarizing level `p_total` when
    /// `n` positions survive to commitment.
    ///
    /// The committed order anti-correlates with rate `q = 1 - p/2`. `hi` sits
    /// three standard errors below `q` at the expected singlet count `n/4`,
    /// but never below the midpoint of `q` and ½. Noiseless this is exactly
    /// 1.0. `lo` trails `hi` by 0.01.
    pub fn for_noise(p_total: f64, n: usize) -> Thresholds {
        let q = 1.0 - p_total.clamp(0.0, 1.0) / 2.0;
        let m = (n as f64 / 4.0).max(1.0);
        let midpoint = (q + 0.5) / 2.0;
        let hi = midpoint.max(q - 3.0 * (q * (1.0 - q) / m).sqrt()).min(1.0);
        Thresholds {
            hi,
            lo: (hi - LO_GAP).max(0.0),
        }
    }

    /// Smallest anti-correlated count out of `m` that meets `hi`.
    pub fn min_pass_count(&self, m: usize) -> usize {
        (self.hi * m as f64 - COUNT_EPS).ceil().max(0.0) as usize
    }

    /// Largest anti-correlated count out of `m` that stays at or below `lo`.
    pub fn max_other_count(&self, m: usize) -> Option<usize> {
        let x = self.lo * m as f64 + COUNT_EPS;
        (x >= 0.0).then(|| x.floor() as usize)
    }
}

/// Session parameters. Field names in the serialized form follow the
/// protocol's customary symbols (`N`, `n_a`, `n_b`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(rename = "N")]
    pub total_pairs: usize,
    #[serde(rename = "n_a")]
    pub alice_checks: usize,
    #[serde(rename = "n_b")]
    pub bob_checks: usize,
    pub axis_policy: AxisPolicy,
    pub verdict_mode: VerdictMode,
    /// Overrides for the noise-derived thresholds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_lo: Option<f64>,
    pub noise: NoiseBudget,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            total_pairs: 300,
            alice_checks: 50,
            bob_checks: 50,
            axis_policy: AxisPolicy::RandomXZ,
            verdict_mode: VerdictMode::DualOrder,
            theta_hi: None,
            theta_lo: None,
            noise: NoiseBudget::noiseless(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("N = {total} must exceed n_a + n_b = {checks}")]
    TooFewPairs { total: usize, checks: usize },
    #[error("thresholds must satisfy 0 <= theta_lo < theta_hi <= 1 (got hi {hi}, lo {lo})")]
    Thresholds { hi: f64, lo: f64 },
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

impl ProtocolConfig {
    /// Positions left for the commitment, `N - n_a - n_b`.
    pub fn committed_len(&self) -> usize {
        self.total_pairs
            .saturating_sub(self.alice_checks + self.bob_checks)
    }

    pub fn thresholds(&self) -> Thresholds {
        let derived = Thresholds::for_noise(self.noise.total(), self.committed_len());
        let hi = self.theta_hi.unwrap_or(derived.hi);
        let lo = match (self.theta_lo, self.theta_hi) {
            (Some(lo), _) => lo,
            (None, Some(hi)) => (hi - LO_GAP).max(0.0),
            (None, None) => derived.lo,
        };
        Thresholds { hi, lo }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks = self.alice_checks + self.bob_checks;
        if self.total_pairs <= checks {
            return Err(ConfigError::TooFewPairs {
                total: self.total_pairs,
                checks,
            });
        }
        self.noise.validate()?;
        self.thresholds().validate()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_noise(mut self, noise: NoiseBudget) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_verdict_mode(mut self, mode: VerdictMode) -> Self {
        self.verdict_mode = mode;
        self
    }
}

//! Binomial arithmetic and interval estimates used by verdicts and reports.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Probability mass function of `Binomial(trials, p)` for every count.
pub fn binomial_pmf(trials: usize, p: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; trials + 1];
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        pmf[trials] = 1.0;
        return pmf;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut ln_choose = 0.0;
    for (k, slot) in pmf.iter_mut().enumerate() {
        if k > 0 {
            ln_choose += ((trials - k + 1) as f64).ln() - (k as f64).ln();
        }
        *slot = (ln_choose + k as f64 * lp + (trials - k) as f64 * lq).exp();
    }
    pmf
}

/// `P(X ≥ k)`
pub fn binomial_tail_ge(trials: usize, p: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > trials {
        return 0.0;
    }
    binomial_pmf(trials, p)[k..].iter().sum::<f64>().min(1.0)
}

/// `P(X ≤ k)`
pub fn binomial_cdf(trials: usize, p: f64, k: usize) -> f64 {
    if k >= trials {
        return 1.0;
    }
    binomial_pmf(trials, p)[..=k].iter().sum::<f64>().min(1.0)
}

/// Standard deviation of a binomial proportion.
pub fn proportion_sigma(trials: usize, p: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// A proportion with its 95% normal-approximation half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
    pub successes: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Estimate {
        let value = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        Estimate {
            value,
            half_width: Z95 * proportion_sigma(trials as usize, value),
            successes,
            trials,
        }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.value + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

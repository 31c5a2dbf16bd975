use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qct_core::adversary::{estimate_bias, BiasReport, Scenario, MIN_RUNS};
use qct_core::noise::NoiseBudget;
use qct_core::protocol::ProtocolConfig;
use qct_core::report::RunReport;
use serde::Serialize;

use crate::args::{AttackArgs, Common, ParamArg, RunArgs, Strategies, SweepArgs};
use crate::EXIT_MISMATCH;

pub const SEED_ENV: &str = "QCT_SEED";

/// Config from file (or defaults) with flag overrides applied. Seed
/// precedence: `--seed`, then `QCT_SEED`, then the config file.
fn load_config(common: &Common) -> Result<ProtocolConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            serde_json::from_str::<ProtocolConfig>(&text)
                .with_context(|| format!("invalid config {}", path.display()))?
        }
        None => ProtocolConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    } else if let Ok(raw) = std::env::var(SEED_ENV) {
        cfg.seed = raw
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}={raw:?} is not an unsigned integer"))?;
    }
    if let Some(p) = common.noise {
        set_env_noise(&mut cfg, p);
    }
    if let Some(v) = common.verdict {
        cfg.verdict_mode = v.into();
    }
    cfg.validate().context("invalid config")?;
    Ok(cfg)
}

/// Replaces the environmental levels, keeping any self-injected noise.
fn set_env_noise(cfg: &mut ProtocolConfig, p_total: f64) {
    let env = NoiseBudget::symmetric_env(p_total);
    cfg.noise.env_a = env.env_a;
    cfg.noise.env_b = env.env_b;
    // symmetric_env clamps; keep out-of-range input visible to validation
    if !(0.0..=1.0).contains(&p_total) {
        cfg.noise.env_a = p_total;
    }
}

fn scenario(s: &Strategies) -> Scenario {
    Scenario::new(s.alice.into(), s.bob.into())
        .with_suppression(s.suppression.into())
        .with_forgery(s.forgery.into())
        .with_game(s.game.into())
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

pub fn run(args: RunArgs) -> Result<u8> {
    let cfg = load_config(&args.common)?;
    let (report, transcript) =
        RunReport::execute(&cfg, args.bit.into(), args.guess.map(Into::into))?;
    write_json(&report, args.out.as_deref())?;
    if let Some(path) = &args.transcript {
        fs::write(path, transcript.to_ndjson())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(if report.success { 0 } else { EXIT_MISMATCH })
}

fn check_runs(runs: u64) -> Result<()> {
    if runs < MIN_RUNS {
        bail!("--runs must be at least {MIN_RUNS} (got {runs})");
    }
    Ok(())
}

/// Flat summary row for CSV output of a [`BiasReport`].
#[derive(Serialize)]
struct AttackRow {
    alice: String,
    bob: String,
    suppression: String,
    forgery: String,
    game: String,
    runs: u64,
    p_a: f64,
    p_a_half_width: f64,
    p_b: f64,
    p_b_half_width: f64,
    epsilon_a: f64,
    epsilon_b: f64,
    abort_rate: f64,
    abort_rate_half_width: f64,
    guess_accuracy: f64,
    flip_success: Option<f64>,
    f_claimed: f64,
    f_other: f64,
    singlet_count_mean: f64,
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

impl From<&BiasReport> for AttackRow {
    fn from(r: &BiasReport) -> AttackRow {
        AttackRow {
            alice: label(&r.scenario.alice),
            bob: label(&r.scenario.bob),
            suppression: label(&r.scenario.suppression),
            forgery: label(&r.scenario.forgery),
            game: label(&r.scenario.game),
            runs: r.runs,
            p_a: r.p_a.value,
            p_a_half_width: r.p_a.half_width,
            p_b: r.p_b.value,
            p_b_half_width: r.p_b.half_width,
            epsilon_a: r.epsilon_a.value,
            epsilon_b: r.epsilon_b.value,
            abort_rate: r.abort_rate.value,
            abort_rate_half_width: r.abort_rate.half_width,
            guess_accuracy: r.guess_accuracy.value,
            flip_success: r.flip_success.map(|e| e.value),
            f_claimed: r.f_claimed,
            f_other: r.f_other,
            singlet_count_mean: r.singlet_count_mean,
        }
    }
}

pub fn attack(args: AttackArgs) -> Result<u8> {
    check_runs(args.runs)?;
    let cfg = load_config(&args.common)?;
    let report = estimate_bias(scenario(&args.strategies), &cfg, args.runs)?;
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        w.serialize(AttackRow::from(&report))?;
        w.flush()?;
    }
    if args.json.is_some() || args.csv.is_none() {
        write_json(&report, args.json.as_deref())?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    runs: u64,
    success_rate: f64,
    abort_rate: f64,
    f_claimed_mean: f64,
    f_other_mean: f64,
    singlet_count_mean: f64,
    guess_accuracy: f64,
    flip_success: Option<f64>,
}

/// Inclusive grid `from, from + step, ...` up to `to`. A missing step is
/// only allowed for a single value.
fn grid(from: f64, to: f64, step: Option<f64>) -> Result<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() || to < from {
        bail!("empty range: --from {from} --to {to}");
    }
    let step = match step {
        Some(s) if s.is_finite() && s > 0.0 => s,
        Some(s) => bail!("empty range: --step {s} must be positive"),
        None if from == to => return Ok(vec![from]),
        None => bail!("--step is required when --from and --to differ"),
    };
    let count = ((to - from) / step + 1e-9).floor() as u64 + 1;
    // round away accumulated binary error so the value column reads cleanly
    Ok((0..count)
        .map(|i| ((from + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

fn apply_param(base: &ProtocolConfig, param: ParamArg, value: f64) -> Result<ProtocolConfig> {
    let mut cfg = base.clone();
    match param {
        ParamArg::Noise => set_env_noise(&mut cfg, value),
        ParamArg::N => {
            if value < 1.0 || value.fract() != 0.0 {
                bail!("--param n needs positive integer values (got {value})");
            }
            cfg.total_pairs = value as usize + cfg.alice_checks + cfg.bob_checks;
        }
        ParamArg::ThetaHi => {
            cfg.theta_hi = Some(value);
            cfg.theta_lo = None;
        }
        ParamArg::DetectorAdvantage => cfg.noise.detector_advantage = value,
    }
    cfg.validate()
        .with_context(|| format!("invalid config at value {value}"))?;
    Ok(cfg)
}

pub fn sweep(args: SweepArgs) -> Result<u8> {
    check_runs(args.runs)?;
    let values = grid(args.from, args.to, args.step)?;
    let base = load_config(&args.common)?;
    let configs = values
        .iter()
        .map(|&v| apply_param(&base, args.param, v))
        .collect::<Result<Vec<_>>>()?;
    let sc = scenario(&args.strategies);
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for (value, cfg) in values.into_iter().zip(configs) {
        let r = estimate_bias(sc, &cfg, args.runs)?;
        w.serialize(SweepRow {
            value,
            runs: r.runs,
            success_rate: 1.0 - r.abort_rate.value,
            abort_rate: r.abort_rate.value,
            f_claimed_mean: r.f_claimed,
            f_other_mean: r.f_other,
            singlet_count_mean: r.singlet_count_mean,
            guess_accuracy: r.guess_accuracy.value,
            flip_success: r.flip_success.map(|e| e.value),
        })?;
        w.flush()?;
    }
    Ok(0)
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qct_core::adversary::{AliceStrategy, BobStrategy, Forgery, Game, Suppression};
use qct_core::protocol::{Bit, VerdictMode};

#[derive(Debug, Parser)]
#[command(
    name = "qct",
    version,
    about = "EPR bit-commitment and coin-toss simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one honest commitment session.
    Run(RunArgs),
    /// Estimate coin bias for a pair of strategies.
    Attack(AttackArgs),
    /// Repeat an attack estimate over a range of one parameter.
    Sweep(SweepArgs),
}

/// Options shared by every command that builds a protocol config.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file (fields N, n_a, n_b, axis_policy, verdict_mode,
    /// theta_hi, theta_lo, noise, seed).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed; falls back to QCT_SEED, then to the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Total environmental depolarizing level, split evenly between sides.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, value_enum)]
    pub verdict: Option<VerdictArg>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub bit: BitArg,
    /// Play the session as a coin toss with this guess from Bob.
    #[arg(long, value_enum)]
    pub guess: Option<BitArg>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the message transcript as NDJSON.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Strategies {
    #[arg(long, value_enum, default_value = "honest")]
    pub alice: AliceArg,
    #[arg(long, value_enum, default_value = "honest")]
    pub bob: BobArg,
    /// Which parties apply their random Paulis.
    #[arg(long, value_enum, default_value = "both")]
    pub suppression: SuppressionArg,
    #[arg(long, value_enum, default_value = "relocate")]
    pub forgery: ForgeryArg,
    /// `coin`: Alice tries to flip only when Bob guessed right;
    /// `flip`: she tries in every run.
    #[arg(long, value_enum, default_value = "coin")]
    pub game: GameArg,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub strategies: Strategies,
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    /// Write a one-row CSV summary.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: ParamArg,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub runs: u64,
    #[command(flatten)]
    pub strategies: Strategies,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BitArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

impl From<BitArg> for Bit {
    fn from(b: BitArg) -> Bit {
        match b {
            BitArg::Zero => Bit::Zero,
            BitArg::One => Bit::One,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerdictArg {
    Claimed,
    Dual,
}

impl From<VerdictArg> for VerdictMode {
    fn from(v: VerdictArg) -> VerdictMode {
        match v {
            VerdictArg::Claimed => VerdictMode::ClaimedOrder,
            VerdictArg::Dual => VerdictMode::DualOrder,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AliceArg {
    Honest,
    WrongDisclosure,
    Reversal,
    ProductSource,
}

impl From<AliceArg> for AliceStrategy {
    fn from(a: AliceArg) -> AliceStrategy {
        match a {
            AliceArg::Honest => AliceStrategy::Honest,
            AliceArg::WrongDisclosure => AliceStrategy::WrongDisclosure,
            AliceArg::Reversal => AliceStrategy::ReversalNoSuppression,
            AliceArg::ProductSource => AliceStrategy::ProductStateSource,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BobArg {
    Honest,
    EarlyMeasure,
    NoSuppressEarlyMeasure,
}

impl From<BobArg> for BobStrategy {
    fn from(b: BobArg) -> BobStrategy {
        match b {
            BobArg::Honest => BobStrategy::HonestGuess,
            BobArg::EarlyMeasure => BobStrategy::EarlyMeasure,
            BobArg::NoSuppressEarlyMeasure => BobStrategy::NoSuppressEarlyMeasure,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuppressionArg {
    Both,
    AliceOnly,
    BobOnly,
    None,
}

impl From<SuppressionArg> for Suppression {
    fn from(s: SuppressionArg) -> Suppression {
        match s {
            SuppressionArg::Both => Suppression::Both,
            SuppressionArg::AliceOnly => Suppression::AliceOnly,
            SuppressionArg::BobOnly => Suppression::BobOnly,
            SuppressionArg::None => Suppression::None,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ForgeryArg {
    Relocate,
    AxisLie,
    Steered,
}

impl From<ForgeryArg> for Forgery {
    fn from(f: ForgeryArg) -> Forgery {
        match f {
            ForgeryArg::Relocate => Forgery::Relocate,
            ForgeryArg::AxisLie => Forgery::AxisLie,
            ForgeryArg::Steered => Forgery::Steered,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GameArg {
    Coin,
    Flip,
}

impl From<GameArg> for Game {
    fn from(g: GameArg) -> Game {
        match g {
            GameArg::Coin => Game::CoinToss,
            GameArg::Flip => Game::ForcedFlip,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamArg {
    Noise,
    N,
    ThetaHi,
    DetectorAdvantage,
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use qct_core::adversary::{
    estimate_bias, run_stream, AliceStrategy, BobStrategy, Game, Scenario, Suppression,
};
use qct_core::noise::{self, NoiseBudget};
use qct_core::protocol::{Bit, ProtocolConfig, Session, VerdictMode};
use qct_core::qsim::{Axis, BellKind, Outcome, PairState, Side, Sides};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Check {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Check {
    Check { passed, detail }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// |v⟩⟨v| written out by hand.
fn projector(v: [Complex64; 4]) -> [[Complex64; 4]; 4] {
    let mut m = [[c(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = v[i] * v[j].conj();
        }
    }
    m
}

fn max_diff(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

fn quarter_identity() -> [[Complex64; 4]; 4] {
    let mut m = [[c(0.0); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(0.25);
    }
    m
}

/// Exact binomial pmf by repeated convolution, independent of the
/// library's log-space recurrence.
fn pmf(n: usize, p: f64) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; row.len() + 1];
        for (k, w) in row.iter().enumerate() {
            next[k] += w * (1.0 - p);
            next[k + 1] += w * p;
        }
        row = next;
    }
    row
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let kets = [
        (BellKind::PsiMinus, [c(0.0), c(h), c(-h), c(0.0)]),
        (BellKind::PsiPlus, [c(0.0), c(h), c(h), c(0.0)]),
        (BellKind::PhiMinus, [c(h), c(0.0), c(0.0), c(-h)]),
        (BellKind::PhiPlus, [c(h), c(0.0), c(0.0), c(h)]),
    ];
    let mut worst: f64 = 0.0;
    for (kind, ket) in kets {
        worst = worst.max(max_diff(PairState::bell(kind).matrix(), &projector(ket)));
    }
    let bells: Vec<_> = BellKind::ALL.iter().map(|&k| PairState::bell(k)).collect();
    let bell_mix = PairState::mix_equal(&bells).unwrap();
    worst = worst.max(max_diff(bell_mix.matrix(), &quarter_identity()));

    let mut products = Vec::new();
    for (a, b) in [
        (Outcome::Up, Outcome::Down),
        (Outcome::Down, Outcome::Up),
        (Outcome::Up, Outcome::Up),
        (Outcome::Down, Outcome::Down),
    ] {
        products.push(PairState::product(a, Axis::Z, b, Axis::Z).unwrap());
    }
    let prod_mix = PairState::mix_equal(&products).unwrap();
    worst = worst.max(max_diff(prod_mix.matrix(), &quarter_identity()));
    let elapsed = start.elapsed();
    check(
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max entry error {worst:.1e}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let singlet = PairState::singlet();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = Axis::random(&mut rng);
        worst = worst.max((singlet.anticorrelation_prob(a, a) - 1.0).abs());
    }
    let mut violations = 0;
    for _ in 0..10_000 {
        let a = Axis::random(&mut rng);
        let (x, post) = singlet.measure_spin(Side::Alice, a, &mut rng);
        let (y, _) = post.measure_spin(Side::Bob, a, &mut rng);
        if x == y {
            violations += 1;
        }
    }
    check(
        worst <= 1e-12 && violations == 0,
        format!("max |P_anti - 1| {worst:.1e}, {violations} violations in 10^4 samples"),
    )
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut correct = 0;
    let mut singlets = 0usize;
    let mut worst_z: f64 = 0.0;
    let (mut other_anti, mut other_total) = (0usize, 0usize);
    for seed in 0..200 {
        for bit in [Bit::Zero, Bit::One] {
            let cfg = ProtocolConfig::default().with_seed(seed);
            let mut s = Session::new(cfg).unwrap();
            let v = match s.run_honest(bit) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if v.decision.bit() == Some(bit) {
                correct += 1;
            }
            singlets += v.singlet_count;
            let other = match bit {
                Bit::Zero => v.anti_reverse,
                Bit::One => v.anti_direct,
            };
            let m = v.compared as f64;
            let z = (other as f64 / m - 0.5) / (0.25 / m).sqrt();
            worst_z = worst_z.max(z.abs());
            other_anti += other;
            other_total += v.compared;
        }
    }
    let elapsed = start.elapsed();
    let mean = singlets as f64 / 400.0;
    let sigma_mean = (200.0 * 0.25 * 0.75 / 400.0f64).sqrt();
    let pooled = other_anti as f64 / other_total as f64;
    check(
        correct == 400
            && (mean - 50.0).abs() <= 3.0 * sigma_mean
            && worst_z <= 4.0
            && elapsed < Duration::from_secs(10),
        format!(
            "{correct}/400 correct, mean singlets {mean:.2} (3σ = {:.2}), wrong-order worst |z| {worst_z:.2} (pooled {pooled:.4}), {elapsed:.2?}",
            3.0 * sigma_mean
        ),
    )
}

fn criterion_4() -> Check {
    let cfg = ProtocolConfig::default().with_seed(4);
    let sc = Scenario::new(AliceStrategy::Honest, BobStrategy::EarlyMeasure)
        .with_suppression(Suppression::None);
    // 500 runs × 200 positions = 10^5 pairs
    let pairs = estimate_bias(sc, &cfg, 500).unwrap();
    let early = pairs.early.unwrap().committed_order;
    let acc = estimate_bias(sc, &cfg.with_seed(40), 1000).unwrap();
    check(
        (early.value - 0.75).abs() <= 0.005
            && early.trials == 100_000
            && acc.guess_accuracy.value >= 0.99,
        format!(
            "anti-correlation {:.4} over {} pairs, guess accuracy {:.4} over {} runs",
            early.value, early.trials, acc.guess_accuracy.value, acc.runs
        ),
    )
}

fn criterion_5() -> Check {
    let cfg = ProtocolConfig::default().with_seed(5);
    let sc = Scenario::new(AliceStrategy::Honest, BobStrategy::EarlyMeasure);
    let r = estimate_bias(sc, &cfg, 10_000).unwrap();
    let acc = r.guess_accuracy;
    let three_sigma = 3.0 * (0.25 / acc.trials as f64).sqrt();
    check(
        (acc.value - 0.5).abs() <= three_sigma && r.epsilon_b.contains(0.0),
        format!(
            "guess accuracy {:.4} (±{three_sigma:.4}), epsilon_B {:+.4} ± {:.4}",
            acc.value, r.epsilon_b.value, r.epsilon_b.half_width
        ),
    )
}

fn criterion_6() -> Check {
    let cfg = ProtocolConfig::default()
        .with_seed(6)
        .with_verdict_mode(VerdictMode::DualOrder);
    let sc = Scenario::new(AliceStrategy::WrongDisclosure, BobStrategy::HonestGuess)
        .with_game(Game::ForcedFlip);
    let r = estimate_bias(sc, &cfg, 10_000).unwrap();
    let flips = r.flip_success.unwrap();
    let aborts = r.flip_abort_rate.unwrap();
    check(
        flips.successes == 0 && flips.trials == 10_000 && aborts.value >= 0.999,
        format!(
            "{} successful flips in {} attempts, abort rate {:.4}",
            flips.successes, flips.trials, aborts.value
        ),
    )
}

fn criterion_7() -> Check {
    let cfg = ProtocolConfig::default()
        .with_seed(7)
        .with_verdict_mode(VerdictMode::ClaimedOrder);
    let open = Scenario::new(
        AliceStrategy::ReversalNoSuppression,
        BobStrategy::HonestGuess,
    )
    .with_suppression(Suppression::None)
    .with_game(Game::ForcedFlip);
    let broken = estimate_bias(open, &cfg, 1000)
        .unwrap()
        .flip_success
        .unwrap();
    let guarded = estimate_bias(open.with_suppression(Suppression::Both), &cfg, 10_000)
        .unwrap()
        .flip_success
        .unwrap();
    check(
        broken.value >= 0.9 && guarded.successes == 0 && guarded.trials == 10_000,
        format!(
            "without Bob's scramble {:.4} over {} runs; with it {} successes in {}",
            broken.value, broken.trials, guarded.successes, guarded.trials
        ),
    )
}

fn criterion_8() -> Check {
    let p = 0.25;
    let cfg = ProtocolConfig::default()
        .with_seed(8)
        .with_noise(NoiseBudget::symmetric_env(p));
    let th = cfg.thresholds();
    let n = cfg.committed_len();

    // Oracle: mixture over the singlet count of the claimed order passing
    // and the other order staying low, each by direct summation.
    let weights = pmf(n, 0.25);
    let mut oracle = 0.0;
    for (m, w) in weights.iter().enumerate().skip(1) {
        let need = (th.hi * m as f64 - 1e-9).ceil() as usize;
        let cap = (th.lo * m as f64 + 1e-9).floor() as usize;
        let claimed: f64 = pmf(m, 1.0 - p / 2.0)[need.min(m + 1)..].iter().sum();
        let other: f64 = pmf(m, 0.5)[..=cap.min(m)].iter().sum();
        oracle += w * claimed * other;
    }
    let library = noise::expected_recovery_confidence(n, p, &th, VerdictMode::DualOrder);

    let runs = 1000;
    let mut ok = 0;
    for i in 0..runs {
        let bit = if i % 2 == 0 { Bit::Zero } else { Bit::One };
        let mut s = Session::new(cfg.clone().with_seed(8_000 + i)).unwrap();
        if let Ok(v) = s.run_honest(bit) {
            if v.decision.bit() == Some(bit) {
                ok += 1;
            }
        }
    }
    let rate = ok as f64 / runs as f64;
    let sigma = (oracle * (1.0 - oracle) / runs as f64).sqrt();
    check(
        rate >= 0.99 && (rate - oracle).abs() <= 3.0 * sigma && (library - oracle).abs() < 1e-9,
        format!(
            "success {rate:.4} over {runs} runs, exact {oracle:.5} (3σ = {:.4}), thresholds hi {:.4} lo {:.4}",
            3.0 * sigma,
            th.hi,
            th.lo
        ),
    )
}

fn criterion_9() -> Check {
    let cfg = ProtocolConfig::default().with_seed(9);
    let r = estimate_bias(Scenario::default(), &cfg, 100_000).unwrap();
    check(
        (r.p_b.value - 0.5).abs() <= 0.005 && r.abort_rate.successes == 0,
        format!(
            "outcome-1 frequency {:.4} over {} runs, {} aborts",
            r.p_b.value, r.runs, r.abort_rate.successes
        ),
    )
}

fn criterion_10() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, p) in [0.0, 0.1, 0.25, 0.5, 1.0].into_iter().enumerate() {
        let mut rng = run_stream(10, i as u64);
        let s = PairState::singlet().depolarize(Sides::Alice, p).unwrap();
        let want = 1.0 - p / 2.0;
        let mut analytic_err: f64 = 0.0;
        let samples = 10_000;
        let mut anti = 0;
        for _ in 0..samples {
            let a = Axis::random(&mut rng);
            analytic_err = analytic_err.max((s.anticorrelation_prob(a, a) - want).abs());
            let (x, post) = s.measure_spin(Side::Alice, a, &mut rng);
            let (y, _) = post.measure_spin(Side::Bob, a, &mut rng);
            if x != y {
                anti += 1;
            }
        }
        let f = anti as f64 / samples as f64;
        let sigma = (want * (1.0 - want) / samples as f64).sqrt();
        ok &= analytic_err <= 1e-12 && (f - want).abs() <= 3.0 * sigma;
        parts.push(format!("p={p}: {f:.4} vs {want:.3}"));
    }
    check(ok, parts.join(", "))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("algebraic identities", criterion_1),
        ("singlet rotational symmetry", criterion_2),
        ("honest round trip at N=300", criterion_3),
        ("early measurement without suppression", criterion_4),
        ("hiding under suppression", criterion_5),
        ("binding under suppression", criterion_6),
        ("reversal without Bob's scramble", criterion_7),
        ("noise tolerance at p=0.25", criterion_8),
        ("coin uniformity", criterion_9),
        ("depolarizing law", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let status = if result.passed { "PASS" } else { "FAIL" };
        if !result.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {status} {name}: {} [{:.1?}]",
            i + 1,
            result.detail,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

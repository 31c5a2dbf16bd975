use qct_core::noise::{
    calibrate_budget, calibrate_environment, compose, expected_recovery_confidence, inject_noise,
    recovery_confidence, NoiseBudget,
};
use qct_core::protocol::{Bit, PairRegister, ProtocolConfig, Thresholds, VerdictMode};
use qct_core::qsim::{PairState, PauliOp, Side, Sides};
use qct_core::RunReport;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn calibration_recovers_injected_levels() {
    for (i, p) in [0.05, 0.1, 0.25].into_iter().enumerate() {
        let source = PairState::singlet().depolarize(Sides::Alice, p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(900 + i as u64);
        let est = calibrate_environment("env_a", &source, 20_000, &mut rng).unwrap();
        assert!(
            (est.level - p).abs() <= 3.0 * est.std_error,
            "p {p}: estimated {} ± {}",
            est.level,
            est.std_error
        );
    }
}

#[test]
fn budget_calibration_covers_both_sides() {
    let budget = NoiseBudget {
        env_a: 0.1,
        env_b: 0.25,
        ..NoiseBudget::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(910);
    let rep = calibrate_budget(&budget, 20_000, &mut rng).unwrap();
    let levels: Vec<_> = rep
        .estimates
        .iter()
        .map(|e| (e.component.as_str(), e.level, e.std_error))
        .collect();
    assert_eq!(levels.len(), 2);
    for ((name, level, se), want) in levels.into_iter().zip([0.1, 0.25]) {
        assert!(
            (level - want).abs() <= 3.0 * se,
            "{name}: {level} vs {want}"
        );
    }
}

/// Exact binomial recovery probability against full protocol runs at about
/// 50 singlets (200 committed positions).
#[test]
fn recovery_confidence_matches_simulation() {
    const RUNS: u64 = 1000;
    for p in [0.1, 0.25] {
        let base = ProtocolConfig::default().with_noise(NoiseBudget::symmetric_env(p));
        assert!((base.noise.total() - p).abs() < 1e-12);
        let th = base.thresholds();
        let exact = expected_recovery_confidence(base.committed_len(), p, &th, base.verdict_mode);
        let mut ok = 0u64;
        for seed in 0..RUNS {
            let cfg = base.clone().with_seed(7000 + seed);
            let bit = if seed % 2 == 0 { Bit::Zero } else { Bit::One };
            let (report, _) = RunReport::execute(&cfg, bit, None).unwrap();
            ok += report.success as u64;
        }
        let freq = ok as f64 / RUNS as f64;
        let sigma = (exact * (1.0 - exact) / RUNS as f64)
            .sqrt()
            .max(1.0 / RUNS as f64);
        assert!(
            (freq - exact).abs() <= 3.0 * sigma,
            "p {p}: {freq} vs exact {exact}"
        );
        assert!(freq >= 0.99, "p {p}: {freq}");
    }
}

#[test]
fn recovery_confidence_falls_with_noise() {
    let th = Thresholds::new(0.75, 0.74).unwrap();
    let mut last = 1.0;
    for i in 0..=10 {
        let p = i as f64 * 0.1;
        let c = recovery_confidence(50, p, &th, VerdictMode::ClaimedOrder);
        assert!(c <= last + 1e-12, "p {p}: {c} after {last}");
        last = c;
    }
}

/// Averaging the commitment-time pair over both parties' uniform Pauli
/// records gives ¼I exactly, with and without environmental and
/// self-injected noise.
#[test]
fn double_suppression_is_maximally_mixed() {
    let quarter = PairState::maximally_mixed();
    for budget in [
        NoiseBudget::noiseless(),
        NoiseBudget {
            env_a: 0.1,
            env_b: 0.05,
            self_a: 0.2,
            self_b: 0.15,
            detector_advantage: 0.0,
        },
    ] {
        let source = PairState::singlet()
            .depolarize(Sides::Alice, budget.env_a)
            .and_then(|s| s.depolarize(Sides::Bob, budget.env_b))
            .unwrap();
        let mut states = Vec::new();
        for ua in PauliOp::ALL {
            for ub in PauliOp::ALL {
                states.push(
                    source
                        .apply_pauli(Side::Alice, ua)
                        .apply_pauli(Side::Bob, ub),
                );
            }
        }
        let mut reg = PairRegister::from_states(states);
        inject_noise(&mut reg, Side::Alice, budget.self_a).unwrap();
        inject_noise(&mut reg, Side::Bob, budget.self_b).unwrap();
        let all: Vec<_> = (0..reg.len()).map(|k| reg.state(k).clone()).collect();
        let avg = PairState::mix_equal(&all).unwrap();
        assert!(avg.max_abs_diff(&quarter) < 1e-12, "{budget:?}");

        // each party's own record already suffices
        for side in [Side::Alice, Side::Bob] {
            let one: Vec<_> = PauliOp::ALL
                .iter()
                .map(|&u| source.apply_pauli(side, u))
                .collect();
            assert!(PairState::mix_equal(&one).unwrap().max_abs_diff(&quarter) < 1e-12);
        }
    }
}

/// Composed levels act like one depolarizing step of the composed strength.
#[test]
fn composition_matches_sequential_channels() {
    let levels = [0.1, 0.2, 0.05, 0.3];
    let mut s = PairState::singlet();
    for &p in &levels {
        s = s.depolarize(Sides::Alice, p).unwrap();
    }
    let once = PairState::singlet()
        .depolarize(Sides::Alice, compose(&levels))
        .unwrap();
    assert!(s.max_abs_diff(&once) < 1e-12);
}

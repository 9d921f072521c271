//! Protocol acceptance against the diamond-norm bound.

use qcd_core::distances::OptimizerConfig;
use qcd_core::protocol::{acceptance_probability, optimal_prover, run_optimal_protocol, run_protocol, ProverStrategy};
use qcd_core::random::{random_circuit, random_projector, random_state};
use qcd_core::{parse_circuit, Circuit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 8,
        ..OptimizerConfig::with_seed(5)
    }
}

#[test]
fn random_strategies_respect_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..5 {
        let q0 = random_circuit(&mut rng, 1, 1, 2, true);
        let q1 = random_circuit(&mut rng, 1, 1, 2, false);
        let (best, witness) = optimal_prover(&q0, &q1, &cfg()).unwrap();
        let optimum = acceptance_probability(&q0, &q1, &best).unwrap();
        assert!((optimum - (0.5 + 0.25 * witness.value)).abs() <= 1e-8);
        for _ in 0..10 {
            let private = rng.random_range(0..=1);
            let d = 2 << private;
            let rank = rng.random_range(0..=d);
            let strat = ProverStrategy {
                psi: random_state(&mut rng, d),
                measurement: random_projector(&mut rng, d, rank),
            };
            let p = acceptance_probability(&q0, &q1, &strat).unwrap();
            assert!(p <= 0.5 + 0.25 * witness.value + 1e-4, "{p} beats {optimum}");
        }
    }
}

#[test]
fn completeness_and_soundness_thresholds() {
    let id = Circuit::identity("id", 1);
    let z = parse_circuit("circuit z inputs 1\ngate Z 0\nend").unwrap();
    let (yes, _) = run_optimal_protocol(&id, &z, &cfg(), 100, 1).unwrap();
    let a = 2.0 - 1e-6;
    assert!(yes.p_accept_exact >= 0.5 + a / 4.0);
    let (no, _) = run_optimal_protocol(&id, &id, &cfg(), 100, 1).unwrap();
    assert!(no.p_accept_exact <= 0.5 + 1e-6 / 4.0);
}

#[test]
fn sampling_lands_near_the_exact_value() {
    let id = Circuit::identity("id", 1);
    let d = parse_circuit("circuit d inputs 1\ndecohere 0\nend").unwrap();
    let (strat, _) = optimal_prover(&id, &d, &cfg()).unwrap();
    for seed in [1, 2, 3] {
        let r = run_protocol(&id, &d, &strat, 100_000, seed).unwrap();
        let p = r.p_accept_exact;
        let sigma = (p * (1.0 - p) / r.trials as f64).sqrt();
        assert!((r.estimate - p).abs() <= 4.0 * sigma, "seed {seed}: {} vs {p}", r.estimate);
    }
}

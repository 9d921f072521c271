//! The two-message distinguishability protocol.
//!
//! The verifier picks `i ∈ {0,1}` uniformly, applies `Q_i` to the register
//! the prover sent, and returns the output; the prover measures output and
//! private register together and announces a guess `j`. The verifier accepts
//! iff `i = j`. Everything is computed on exact density matrices; sampling
//! only draws from the exact outcome distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::distances::{diamond_norm, DiamondWitness, OptimizerConfig};
use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, StateVector};
use crate::reductions::same_kind;
use crate::simulator::{apply_extended, choi_of};

/// Projector tolerance for measurements.
const PROJECTOR_TOL: f64 = 1e-9;

/// A prover's input state and final measurement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProverStrategy {
    /// State on `input ⊗ private`, input first.
    pub psi: StateVector,
    /// Projector on `output ⊗ private`; outcome 0 ("`Q0` was applied")
    /// corresponds to this projector.
    pub measurement: ComplexMatrix,
}

impl ProverStrategy {
    /// Checks that the strategy fits circuits of type `(n_in, n_out)` and
    /// returns the number of private qubits.
    pub fn private_qubits(&self, n_in: usize, n_out: usize) -> Result<usize> {
        let d_in = 1usize << n_in;
        let dim = self.psi.dim();
        if !dim.is_multiple_of(d_in) || !(dim / d_in).is_power_of_two() {
            return Err(Error::Shape(format!(
                "prover state of dimension {dim} does not split as 2^{n_in} x 2^k"
            )));
        }
        let private = (dim / d_in).trailing_zeros() as usize;
        let want = 1usize << (n_out + private);
        let m = &self.measurement;
        if !m.is_square() || m.rows() != want {
            return Err(Error::Shape(format!(
                "measurement must be {want}x{want}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = (m * m).max_abs_diff(m).max(m.hermitian_defect());
        if defect > PROJECTOR_TOL {
            return Err(Error::Domain(format!(
                "measurement is not a projector (defect {defect:.3e})"
            )));
        }
        Ok(private)
    }
}

/// The prover strategy built from a diamond-norm witness: send the witness
/// input and measure with its Helstrom projector.
pub fn optimal_prover(q0: &Circuit, q1: &Circuit, cfg: &OptimizerConfig) -> Result<(ProverStrategy, DiamondWitness)> {
    same_kind(q0, q1)?;
    let witness = diamond_norm(&choi_of(q0)?, &choi_of(q1)?, cfg)?;
    let strategy = ProverStrategy {
        psi: witness.psi.clone(),
        measurement: witness.measurement.clone(),
    };
    Ok((strategy, witness))
}

/// `tr(M ρ_i)` for `ρ_i = (Q_i ⊗ I)(ψψ†)`, i.e. the probability that the
/// prover answers 0 when the verifier applied `Q_i`.
fn answer_zero_probabilities(q0: &Circuit, q1: &Circuit, strat: &ProverStrategy) -> Result<[f64; 2]> {
    let (n_in, n_out) = same_kind(q0, q1)?;
    let private = strat.private_qubits(n_in, n_out)?;
    let input = strat.psi.density();
    let mut probs = [0.0; 2];
    for (p, q) in probs.iter_mut().zip([q0, q1]) {
        let rho = apply_extended(q, &input, private)?;
        *p = strat.measurement.trace_product(rho.matrix()).re.clamp(0.0, 1.0);
    }
    Ok(probs)
}

/// `½ tr(M ρ0) + ½ tr((I − M) ρ1)`.
pub fn acceptance_probability(q0: &Circuit, q1: &Circuit, strat: &ProverStrategy) -> Result<f64> {
    let [p0, p1] = answer_zero_probabilities(q0, q1, strat)?;
    Ok(0.5 * p0 + 0.5 * (1.0 - p1))
}

/// Exact and sampled acceptance of one strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub p_accept_exact: f64,
    pub trials: u64,
    pub accepts: u64,
    pub estimate: f64,
    /// Diamond-norm lower bound behind the strategy, when it came from
    /// [`optimal_prover`].
    pub dnorm_witness_value: Option<f64>,
    pub seed: u64,
}

/// Plays the protocol `trials` times. Trial `t` draws from stream `t` of a
/// generator seeded with `seed`, so the tally does not depend on how trials
/// are scheduled across threads.
pub fn run_protocol(
    q0: &Circuit,
    q1: &Circuit,
    strat: &ProverStrategy,
    trials: u64,
    seed: u64,
) -> Result<ProtocolResult> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let probs = answer_zero_probabilities(q0, q1, strat)?;
    let accepts: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let i = usize::from(rng.random::<bool>());
            let j = if rng.random::<f64>() < probs[i] { 0 } else { 1 };
            u64::from(i == j)
        })
        .sum();
    Ok(ProtocolResult {
        p_accept_exact: 0.5 * probs[0] + 0.5 * (1.0 - probs[1]),
        trials,
        accepts,
        estimate: accepts as f64 / trials as f64,
        dnorm_witness_value: None,
        seed,
    })
}

/// [`run_protocol`] with the optimal prover; records the witness value.
pub fn run_optimal_protocol(
    q0: &Circuit,
    q1: &Circuit,
    cfg: &OptimizerConfig,
    trials: u64,
    seed: u64,
) -> Result<(ProtocolResult, DiamondWitness)> {
    let (strat, witness) = optimal_prover(q0, q1, cfg)?;
    let mut result = run_protocol(q0, q1, &strat, trials, seed)?;
    result.dnorm_witness_value = Some(witness.value);
    Ok((result, witness))
}

/// Sends `|0…0⟩` with no private register and always answers 0; accepted
/// with probability exactly ½.
pub fn trivial_strategy(n_in: usize, n_out: usize) -> ProverStrategy {
    ProverStrategy {
        psi: StateVector::basis(1 << n_in, 0),
        measurement: ComplexMatrix::identity(1 << n_out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Gate};

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 4,
            ..OptimizerConfig::with_seed(11)
        }
    }

    fn z() -> Circuit {
        parse_circuit("circuit z inputs 1\ngate Z 0\nend").unwrap()
    }

    fn dephase() -> Circuit {
        Circuit::with_gates("d", 1, vec![Gate::decohere(0)])
    }

    #[test]
    fn identical_circuits_accept_half() {
        let id = Circuit::identity("id", 1);
        let (s, w) = optimal_prover(&id, &id, &quick()).unwrap();
        assert!(w.value.abs() < 1e-12);
        assert!((acceptance_probability(&id, &id, &s).unwrap() - 0.5).abs() < 1e-12);
        let t = trivial_strategy(1, 1);
        assert!((acceptance_probability(&id, &id, &t).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn phase_flip_is_perfectly_distinguishable() {
        let id = Circuit::identity("id", 1);
        let (s, _) = optimal_prover(&id, &z(), &quick()).unwrap();
        assert!((acceptance_probability(&id, &z(), &s).unwrap() - 1.0).abs() < 1e-9);
        let r = run_protocol(&id, &z(), &s, 1000, 5).unwrap();
        assert_eq!(r.accepts, r.trials);
    }

    #[test]
    fn optimal_acceptance_matches_witness() {
        let id = Circuit::identity("id", 1);
        let (s, w) = optimal_prover(&id, &dephase(), &quick()).unwrap();
        let p = acceptance_probability(&id, &dephase(), &s).unwrap();
        assert!((p - (0.5 + 0.25 * w.value)).abs() < 1e-8);
        assert!((p - 0.75).abs() < 1e-6);
    }

    #[test]
    fn sampling_is_reproducible() {
        let id = Circuit::identity("id", 1);
        let (s, _) = optimal_prover(&id, &dephase(), &quick()).unwrap();
        let a = run_protocol(&id, &dephase(), &s, 2000, 9).unwrap();
        let b = run_protocol(&id, &dephase(), &s, 2000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_strategies_rejected() {
        let id = Circuit::identity("id", 1);
        let bad = ProverStrategy {
            psi: StateVector::basis(2, 0),
            measurement: ComplexMatrix::from_real_diag(&[0.5, 0.0]),
        };
        assert!(acceptance_probability(&id, &id, &bad).is_err());
        let wrong_dim = ProverStrategy {
            psi: StateVector::basis(2, 0),
            measurement: ComplexMatrix::identity(4),
        };
        assert!(acceptance_probability(&id, &id, &wrong_dim).is_err());
        assert!(run_protocol(&id, &id, &trivial_strategy(1, 1), 0, 0).is_err());
    }
}

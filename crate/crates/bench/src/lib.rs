//! Shared inputs for the criterion benchmarks.

use qcd_core::circuit::{Circuit, Gate};
use qcd_core::random::{random_circuit, random_density};
use qcd_core::DensityMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A reproducible pair of random states on `qubits` qubits.
pub fn state_pair(qubits: usize, seed: u64) -> (DensityMatrix, DensityMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (random_density(&mut rng, 1 << qubits), random_density(&mut rng, 1 << qubits))
}

/// A reproducible pair of random `(n, n)` circuits with one ancilla each.
pub fn circuit_pair(n: usize, seed: u64) -> (Circuit, Circuit) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (random_circuit(&mut rng, n, 1, 2, true), random_circuit(&mut rng, n, 1, 2, false))
}

/// The identity and the completely dephasing channel on one qubit.
pub fn identity_and_dephase() -> (Circuit, Circuit) {
    (
        Circuit::identity("id", 1),
        Circuit::with_gates("dephase", 1, vec![Gate::decohere(0)]),
    )
}

//! Mixed-state quantum circuits and the distances between them.
//!
//! * [`numkernel`] — dense complex linear algebra, density matrices, states.
//! * [`circuit`] — the circuit representation, its text format and builder.
//! * [`simulator`] — density-matrix evaluation, Choi/Kraus forms, dilations.
//! * [`distances`] — trace norm, fidelity, Helstrom, diamond norm, image fidelity.
//! * [`reductions`] — controlled join, image-closeness reduction, amplifiers.
//! * [`protocol`] — exact and sampled runs of the distinguishability protocol.

pub mod circuit;
pub mod distances;
pub mod error;
pub mod numkernel;
pub mod protocol;
pub mod random;
pub mod reductions;
pub mod simulator;

pub use circuit::{parse_circuit, serialize_circuit, Circuit, Gate, GateKind, InstanceKind, ProblemInstance, StdGate};
pub use error::{Error, Result};
pub use numkernel::{ComplexMatrix, DensityMatrix, StateVector};
pub use simulator::{apply, apply_extended, choi_of, dilate, Channel, DilatedCircuit};
pub use distances::{
    diamond_norm, fidelity, fidelity_via_purification, helstrom, max_image_fidelity, trace_distance, trace_norm,
    DiamondWitness, ImageFidelity, OptimizerConfig,
};
pub use protocol::{acceptance_probability, optimal_prover, run_optimal_protocol, run_protocol, ProtocolResult, ProverStrategy};
pub use reductions::{ci_to_qcd, controlled_join, parity_mix, polarize, tensor_power, Certificate, PolarizationParams, StageCounts};

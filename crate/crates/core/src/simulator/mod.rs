//! Exact simulation of mixed-state circuits.
//!
//! Two independent evaluation paths exist: [`apply`] walks the gate list on a
//! density matrix, while [`choi_of`] dilates the circuit and propagates pure
//! basis states through the resulting unitary circuit.

mod channel;
mod dilate;
pub(crate) mod kernel;

pub use channel::{adjoint_apply, choi_of, kraus_of, Channel, KRAUS_CUTOFF};
pub(crate) use channel::{contract_adjoint, contract_forward};
pub use dilate::{dilate, DilatedCircuit};

use num_complex::Complex64;

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::numkernel::{check_qubits, dim_cap, ComplexMatrix, DensityMatrix};

/// Runs `c` on `rho`.
pub fn apply(c: &Circuit, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_extended(c, rho, 0)
}

/// Runs `c ⊗ I` on a joint state whose last `ref_qubits` qubits are an
/// untouched reference.
pub fn apply_extended(c: &Circuit, rho: &DensityMatrix, ref_qubits: usize) -> Result<DensityMatrix> {
    let out = apply_to_operator(c, rho.matrix(), ref_qubits)?;
    Ok(DensityMatrix::from_raw(out.hermitian_part()))
}

/// `(c ⊗ I)(x)` for an arbitrary square operator `x`; the map is linear, so
/// this is how basis elements `|i⟩⟨j|` are pushed through a circuit.
pub fn apply_to_operator(c: &Circuit, x: &ComplexMatrix, ref_qubits: usize) -> Result<ComplexMatrix> {
    c.ensure_valid()?;
    let expected = c.n_in + ref_qubits;
    if !x.is_square() || x.rows() != 1usize << expected {
        let dim = 1usize << expected;
        return Err(Error::Shape(format!(
            "circuit `{}` with {ref_qubits} reference qubits expects a {dim}x{dim} operator, got {}x{}",
            c.name,
            x.rows(),
            x.cols()
        )));
    }
    let mut live = c.n_in;
    let mut state = x.clone();
    for gate in &c.gates {
        let nq = live + ref_qubits;
        match &gate.kind {
            GateKind::Unitary { matrix, .. } => kernel::conjugate(&mut state, nq, matrix, &gate.wires),
            GateKind::Ancilla => {
                check_qubits(nq + 1, &format!("register while simulating `{}`", c.name))?;
                state = kernel::insert_zero(&state, nq, live);
                live += 1;
            }
            GateKind::Trace => {
                state = kernel::trace_qubit(&state, nq, gate.wires[0]);
                live -= 1;
            }
            GateKind::Decohere => kernel::decohere(&mut state, nq, gate.wires[0]),
        }
    }
    Ok(state)
}

/// Runs a unitary-only circuit on a state vector of `c.n_in` qubits.
pub(crate) fn run_unitary_vector(c: &Circuit, psi: &mut [Complex64]) {
    debug_assert!(c.is_unitary_only());
    debug_assert_eq!(psi.len(), 1usize << c.n_in);
    for gate in &c.gates {
        if let GateKind::Unitary { matrix, .. } = &gate.kind {
            kernel::apply_left(psi, c.n_in, 1, matrix, &gate.wires);
        }
    }
}

/// Checks that a pure register of `qubits` qubits fits in the memory budget
/// of a cap-sized matrix.
pub(crate) fn check_vector_qubits(qubits: usize, what: &str) -> Result<()> {
    let cap = dim_cap();
    let budget = cap.saturating_mul(cap);
    if qubits >= usize::BITS as usize - 1 || (1usize << qubits) > budget {
        return Err(Error::size(what, format!("2^{qubits} amplitudes"), cap));
    }
    Ok(())
}

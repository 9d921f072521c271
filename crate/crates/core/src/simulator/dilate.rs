use crate::circuit::{swap_matrix, Circuit, CircuitBuilder, Gate, GateKind, StdGate};
use crate::error::{Error, Result};
use crate::numkernel::{check_qubits, partial_trace, tensor, DensityMatrix};

/// A unitary circuit on `n_in + k` wires that reproduces a mixed-state
/// circuit once the last `k` wires start in `|0⟩` and the garbage wires are
/// discarded.
///
/// Wires `0..n_in` carry the inputs and `n_in..n_in+k` are the ancillas.
#[derive(Clone, Debug, PartialEq)]
pub struct DilatedCircuit {
    /// Unitary-only circuit over all `n_in + k` wires.
    pub unitary_circuit: Circuit,
    pub n_in: usize,
    /// Number of ancilla wires prepared in `|0⟩`.
    pub k: usize,
    /// Number of discarded wires.
    pub l: usize,
    /// Wires holding the outputs, in output order.
    pub output_wires: Vec<usize>,
    /// Wires that are traced out at the end.
    pub garbage_wires: Vec<usize>,
}

/// Purifies a circuit: every ancilla becomes a fresh input wire in `|0⟩`,
/// every trace defers the wire to the garbage, and every decoherence copies
/// the wire's computational value into a fresh garbage ancilla with a CNOT.
pub fn dilate(c: &Circuit) -> Result<DilatedCircuit> {
    c.ensure_valid()?;
    let mut live: Vec<usize> = (0..c.n_in).collect();
    let mut garbage = Vec::new();
    let mut gates = Vec::new();
    let mut k = 0;
    for g in &c.gates {
        match &g.kind {
            GateKind::Unitary { matrix, label } => gates.push(Gate {
                kind: GateKind::Unitary {
                    matrix: matrix.clone(),
                    label: *label,
                },
                wires: g.wires.iter().map(|&w| live[w]).collect(),
            }),
            GateKind::Ancilla => {
                live.push(c.n_in + k);
                k += 1;
            }
            GateKind::Trace => garbage.push(live.remove(g.wires[0])),
            GateKind::Decohere => {
                let anc = c.n_in + k;
                k += 1;
                gates.push(Gate::std(StdGate::Cnot, vec![live[g.wires[0]], anc]));
                garbage.push(anc);
            }
        }
    }
    Ok(DilatedCircuit {
        unitary_circuit: Circuit::with_gates(format!("{}_dilated", c.name), c.n_in + k, gates),
        n_in: c.n_in,
        k,
        l: garbage.len(),
        output_wires: live,
        garbage_wires: garbage,
    })
}

impl DilatedCircuit {
    /// Total number of wires of the unitary circuit.
    pub fn width(&self) -> usize {
        self.n_in + self.k
    }

    pub fn n_out(&self) -> usize {
        self.output_wires.len()
    }

    /// Evaluates `ρ ↦ tr_G[U (ρ ⊗ |0^k⟩⟨0^k|) U†]` on density matrices.
    pub fn simulate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.qubits() != self.n_in {
            return Err(Error::Shape(format!(
                "dilated circuit takes {} qubits, state has {}",
                self.n_in,
                rho.qubits()
            )));
        }
        check_qubits(self.width(), "dilated register")?;
        let zeros = DensityMatrix::basis(self.k, 0);
        let joint = DensityMatrix::from_raw(tensor(rho.matrix(), zeros.matrix())?);
        let out = super::apply(&self.unitary_circuit, &joint)?;
        let reduced = partial_trace(out.matrix(), &vec![2; self.width()], &self.output_wires)?;
        Ok(DensityMatrix::from_raw(reduced.hermitian_part()))
    }

    /// Rebuilds a mixed-state circuit: allocate the ancillas, run the
    /// unitary, trace the garbage and route the outputs into place.
    pub fn to_circuit(&self) -> Result<Circuit> {
        let (mut b, inputs) = CircuitBuilder::new(self.unitary_circuit.name.clone(), self.n_in);
        let mut wires = inputs;
        for _ in 0..self.k {
            wires.push(b.ancilla());
        }
        let inner = Circuit::with_gates("u", self.width(), self.unitary_circuit.gates.clone());
        let outs = b.embed(&inner, &wires)?;
        for &g in &self.garbage_wires {
            b.trace(outs[g]);
        }
        let ordered: Vec<_> = self.output_wires.iter().map(|&w| outs[w]).collect();
        b.finish(&ordered)
    }

    /// Adds `extra` idle ancillas, all discarded at the end.
    pub fn pad(&self, extra: usize) -> DilatedCircuit {
        let mut d = self.clone();
        let w = self.width();
        d.garbage_wires.extend(w..w + extra);
        d.k += extra;
        d.l += extra;
        d.unitary_circuit.n_in += extra;
        d
    }

    /// Appends SWAPs so the outputs occupy wires `0..n_out` in order and the
    /// garbage occupies the remaining wires.
    pub fn canonical(&self) -> DilatedCircuit {
        let mut d = self.clone();
        let target: Vec<usize> = self.output_wires.iter().chain(&self.garbage_wires).copied().collect();
        // holds[p] = original wire whose content currently sits on wire p
        let mut holds: Vec<usize> = (0..self.width()).collect();
        for (t, &want) in target.iter().enumerate() {
            let p = holds.iter().position(|&h| h == want).expect("wire present");
            if p != t {
                d.unitary_circuit.push(Gate::unitary(swap_matrix(), vec![t, p]));
                holds.swap(t, p);
            }
        }
        d.output_wires = (0..self.n_out()).collect();
        d.garbage_wires = (self.n_out()..self.width()).collect();
        d
    }
}

use super::{swap_matrix, Circuit, Gate, GateKind, StdGate};
use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;

/// Stable handle to a wire, independent of index shifts caused by `trace`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WireId(usize);

/// Assembles circuits from wire handles and keeps liveness-order indices in
/// sync as wires are created and discarded.
#[derive(Debug)]
pub struct CircuitBuilder {
    circuit: Circuit,
    live: Vec<WireId>,
    next: usize,
}

impl CircuitBuilder {
    /// A builder for a circuit with `n_in` inputs, plus their handles.
    pub fn new(name: impl Into<String>, n_in: usize) -> (Self, Vec<WireId>) {
        let inputs: Vec<WireId> = (0..n_in).map(WireId).collect();
        let b = CircuitBuilder {
            circuit: Circuit::new(name, n_in),
            live: inputs.clone(),
            next: n_in,
        };
        (b, inputs)
    }

    fn index(&self, w: WireId) -> usize {
        self.live
            .iter()
            .position(|&x| x == w)
            .unwrap_or_else(|| panic!("wire {w:?} is not live"))
    }

    pub fn live(&self) -> &[WireId] {
        &self.live
    }

    pub fn ancilla(&mut self) -> WireId {
        let id = WireId(self.next);
        self.next += 1;
        self.live.push(id);
        self.circuit.gates.push(Gate::ancilla());
        id
    }

    pub fn unitary(&mut self, matrix: ComplexMatrix, wires: &[WireId]) {
        let idx = wires.iter().map(|&w| self.index(w)).collect();
        self.circuit.gates.push(Gate::unitary(matrix, idx));
    }

    pub fn std(&mut self, gate: StdGate, wires: &[WireId]) {
        let idx = wires.iter().map(|&w| self.index(w)).collect();
        self.circuit.gates.push(Gate::std(gate, idx));
    }

    pub fn trace(&mut self, w: WireId) {
        let i = self.index(w);
        self.live.remove(i);
        self.circuit.gates.push(Gate::trace(i));
    }

    pub fn decohere(&mut self, w: WireId) {
        let i = self.index(w);
        self.circuit.gates.push(Gate::decohere(i));
    }

    pub fn swap(&mut self, a: WireId, b: WireId) {
        let (i, j) = (self.index(a), self.index(b));
        self.circuit.gates.push(Gate::unitary(swap_matrix(), vec![i, j]));
    }

    /// Appends the gates of `c` with its inputs bound to `inputs`; returns the
    /// handles of its outputs in order.
    pub fn embed(&mut self, c: &Circuit, inputs: &[WireId]) -> Result<Vec<WireId>> {
        if inputs.len() != c.n_in {
            return Err(Error::Shape(format!(
                "circuit `{}` takes {} inputs, {} supplied",
                c.name,
                c.n_in,
                inputs.len()
            )));
        }
        c.ensure_valid()?;
        let mut local = inputs.to_vec();
        for g in &c.gates {
            match &g.kind {
                GateKind::Unitary { matrix, label } => {
                    let idx: Vec<usize> = g.wires.iter().map(|&w| self.index(local[w])).collect();
                    self.circuit.gates.push(Gate {
                        kind: GateKind::Unitary {
                            matrix: matrix.clone(),
                            label: *label,
                        },
                        wires: idx,
                    });
                }
                GateKind::Ancilla => local.push(self.ancilla()),
                GateKind::Trace => {
                    let w = local.remove(g.wires[0]);
                    self.trace(w);
                }
                GateKind::Decohere => self.decohere(local[g.wires[0]]),
            }
        }
        Ok(local)
    }

    /// Finishes the circuit. `outputs` must list every live wire exactly once;
    /// SWAP gates are appended as needed so the outputs appear in that order.
    pub fn finish(mut self, outputs: &[WireId]) -> Result<Circuit> {
        let mut sorted_live = self.live.clone();
        let mut sorted_out = outputs.to_vec();
        sorted_live.sort_by_key(|w| w.0);
        sorted_out.sort_by_key(|w| w.0);
        if sorted_live != sorted_out {
            return Err(Error::Construction(format!(
                "output list {outputs:?} does not match live wires {:?}",
                self.live
            )));
        }
        for (pos, &want) in outputs.iter().enumerate() {
            let cur = self.index(want);
            if cur != pos {
                let other = self.live[pos];
                self.swap(other, want);
                self.live.swap(pos, cur);
            }
        }
        Ok(self.circuit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_track_traces() {
        let (mut b, ins) = CircuitBuilder::new("b", 3);
        b.trace(ins[0]);
        b.std(StdGate::Cnot, &[ins[2], ins[1]]);
        let a = b.ancilla();
        b.decohere(a);
        let c = b.finish(&[ins[1], ins[2], a]).unwrap();
        assert_eq!(c.gates[1].wires, vec![1, 0]);
        assert_eq!(c.gates[3].wires, vec![2]);
        assert!(c.validate().is_empty());
        assert_eq!(c.kind(), (3, 3));
    }

    #[test]
    fn finish_reorders_with_swaps() {
        let (b, ins) = CircuitBuilder::new("b", 3);
        let c = b.finish(&[ins[2], ins[0], ins[1]]).unwrap();
        assert!(c.gates.iter().all(|g| g.arity() == 2));
        assert!(!c.gates.is_empty());
    }

    #[test]
    fn finish_rejects_missing_outputs() {
        let (b, ins) = CircuitBuilder::new("b", 2);
        assert!(b.finish(&[ins[0]]).is_err());
    }

    #[test]
    fn embed_maps_wires() {
        let inner = Circuit::with_gates(
            "inner",
            1,
            vec![Gate::ancilla(), Gate::std(StdGate::Cnot, vec![0, 1]), Gate::trace(0)],
        );
        let (mut b, ins) = CircuitBuilder::new("outer", 2);
        let outs = b.embed(&inner, &[ins[1]]).unwrap();
        assert_eq!(outs.len(), 1);
        let c = b.finish(&[ins[0], outs[0]]).unwrap();
        assert_eq!(c.gates[1].wires, vec![1, 2]);
        assert_eq!(c.gates[2], Gate::trace(1));
        assert!(c.validate().is_empty());
    }
}

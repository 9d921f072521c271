use std::fmt;

use super::{Circuit, GateKind, MAX_ARITY, UNITARITY_TOL};
use crate::numkernel::ComplexMatrix;

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    WireNotLive { wire: usize, live: usize },
    DuplicateWire { wire: usize },
    WrongWireCount { expected: usize, got: usize },
    MatrixShape { rows: usize, cols: usize },
    ArityTooLarge { arity: usize },
    NotUnitary { deviation: f64 },
}

/// One structural problem, located by gate index and, for parsed circuits,
/// by source line.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub gate: usize,
    pub line: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line} (gate {}): ", self.gate)?,
            None => write!(f, "gate {}: ", self.gate)?,
        }
        match &self.kind {
            ViolationKind::WireNotLive { wire, live } => {
                write!(f, "wire {wire} is not live ({live} live wires)")
            }
            ViolationKind::DuplicateWire { wire } => write!(f, "wire {wire} listed twice"),
            ViolationKind::WrongWireCount { expected, got } => {
                write!(f, "expected {expected} wires, got {got}")
            }
            ViolationKind::MatrixShape { rows, cols } => {
                write!(f, "{rows}x{cols} matrix is not a square power-of-two size")
            }
            ViolationKind::ArityTooLarge { arity } => {
                write!(f, "unitary arity {arity} exceeds the cap of {MAX_ARITY}")
            }
            ViolationKind::NotUnitary { deviation } => {
                write!(f, "gate is not unitary: ||U^dag U - I|| = {deviation:.3e}")
            }
        }
    }
}

pub(super) fn unitarity_deviation(m: &ComplexMatrix) -> f64 {
    (&m.adjoint() * m).distance(&ComplexMatrix::identity(m.cols()))
}

pub(super) fn validate(c: &Circuit) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut live = c.n_in;
    for (idx, gate) in c.gates.iter().enumerate() {
        let mut flag = |kind| {
            out.push(Violation {
                gate: idx,
                line: None,
                kind,
            })
        };
        let expected = match &gate.kind {
            GateKind::Unitary { matrix, .. } => {
                let (r, cl) = (matrix.rows(), matrix.cols());
                if r != cl || !r.is_power_of_two() || r < 2 {
                    flag(ViolationKind::MatrixShape { rows: r, cols: cl });
                    None
                } else {
                    let arity = gate.arity();
                    if arity > MAX_ARITY {
                        flag(ViolationKind::ArityTooLarge { arity });
                    } else {
                        let deviation = unitarity_deviation(matrix);
                        if deviation > UNITARITY_TOL {
                            flag(ViolationKind::NotUnitary { deviation });
                        }
                    }
                    Some(arity)
                }
            }
            GateKind::Ancilla => Some(0),
            GateKind::Trace | GateKind::Decohere => Some(1),
        };
        if let Some(expected) = expected {
            if gate.wires.len() != expected {
                flag(ViolationKind::WrongWireCount {
                    expected,
                    got: gate.wires.len(),
                });
            }
        }
        for (i, &w) in gate.wires.iter().enumerate() {
            if w >= live {
                flag(ViolationKind::WireNotLive { wire: w, live });
            }
            if gate.wires[..i].contains(&w) {
                flag(ViolationKind::DuplicateWire { wire: w });
            }
        }
        match gate.kind {
            GateKind::Ancilla => live += 1,
            GateKind::Trace if gate.wires.len() == 1 && gate.wires[0] < live => live -= 1,
            _ => {}
        }
    }
    out
}

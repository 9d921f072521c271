//! Mixed-state circuit representation.
//!
//! A circuit of type `(n, m)` takes `n` input qubits and ends with `m` live
//! wires. Wires are indexed by liveness order: an [`GateKind::Ancilla`] gate
//! appends a fresh `|0⟩` wire at the highest index, and a
//! [`GateKind::Trace`] gate removes its wire, shifting every higher index
//! down by one.

mod builder;
mod text;
mod validate;

pub use builder::{CircuitBuilder, WireId};
pub use text::{parse_circuit, serialize_circuit};
pub use validate::{Violation, ViolationKind};

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{c, ComplexMatrix};

/// Largest arity of an explicit unitary gate.
pub const MAX_ARITY: usize = 3;

/// Tolerance on `‖U†U − I‖_F` for unitary gates.
pub const UNITARITY_TOL: f64 = 1e-9;

/// Named gates accepted by the text format. Each expands to a fixed matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StdGate {
    H,
    X,
    Z,
    T,
    Cnot,
    Cz,
}

impl StdGate {
    pub const ALL: [StdGate; 6] = [
        StdGate::H,
        StdGate::X,
        StdGate::Z,
        StdGate::T,
        StdGate::Cnot,
        StdGate::Cz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StdGate::H => "H",
            StdGate::X => "X",
            StdGate::Z => "Z",
            StdGate::T => "T",
            StdGate::Cnot => "CNOT",
            StdGate::Cz => "CZ",
        }
    }

    pub fn from_name(name: &str) -> Option<StdGate> {
        StdGate::ALL.into_iter().find(|g| g.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            StdGate::Cnot | StdGate::Cz => 2,
            _ => 1,
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let s = c(FRAC_1_SQRT_2, 0.0);
        let (rows, data) = match self {
            StdGate::H => (2, vec![s, s, s, -s]),
            StdGate::X => (2, vec![z, o, o, z]),
            StdGate::Z => (2, vec![o, z, z, -o]),
            StdGate::T => (2, vec![o, z, z, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]),
            StdGate::Cnot => (
                4,
                vec![o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z],
            ),
            StdGate::Cz => (
                4,
                vec![o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, -o],
            ),
        };
        ComplexMatrix::from_raw(rows, rows, data)
    }
}

/// Two-qubit SWAP.
pub fn swap_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    /// Explicit unitary on `log2(matrix side)` wires; `label` records the
    /// named gate it came from, if any.
    Unitary {
        matrix: ComplexMatrix,
        label: Option<StdGate>,
    },
    /// Introduces a fresh wire in state `|0⟩`.
    Ancilla,
    /// Discards its wire.
    Trace,
    /// Completely dephases its wire in the computational basis.
    Decohere,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub wires: Vec<usize>,
}

impl Gate {
    pub fn unitary(matrix: ComplexMatrix, wires: Vec<usize>) -> Gate {
        Gate {
            kind: GateKind::Unitary {
                matrix,
                label: None,
            },
            wires,
        }
    }

    pub fn std(gate: StdGate, wires: Vec<usize>) -> Gate {
        Gate {
            kind: GateKind::Unitary {
                matrix: gate.matrix(),
                label: Some(gate),
            },
            wires,
        }
    }

    pub fn ancilla() -> Gate {
        Gate {
            kind: GateKind::Ancilla,
            wires: vec![],
        }
    }

    pub fn trace(wire: usize) -> Gate {
        Gate {
            kind: GateKind::Trace,
            wires: vec![wire],
        }
    }

    pub fn decohere(wire: usize) -> Gate {
        Gate {
            kind: GateKind::Decohere,
            wires: vec![wire],
        }
    }

    /// Number of wires a unitary acts on; zero for the other kinds.
    pub fn arity(&self) -> usize {
        match &self.kind {
            GateKind::Unitary { matrix, .. } => matrix.rows().trailing_zeros() as usize,
            _ => 0,
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(self.kind, GateKind::Unitary { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub name: String,
    pub n_in: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, n_in: usize) -> Circuit {
        Circuit {
            name: name.into(),
            n_in,
            gates: Vec::new(),
        }
    }

    pub fn with_gates(name: impl Into<String>, n_in: usize, gates: Vec<Gate>) -> Circuit {
        Circuit {
            name: name.into(),
            n_in,
            gates,
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    /// Output width `n_in + #ancilla − #trace`.
    pub fn n_out(&self) -> usize {
        let mut live = self.n_in as isize;
        for g in &self.gates {
            match g.kind {
                GateKind::Ancilla => live += 1,
                GateKind::Trace => live -= 1,
                _ => {}
            }
        }
        live.max(0) as usize
    }

    /// `(n_in, n_out)`.
    pub fn kind(&self) -> (usize, usize) {
        (self.n_in, self.n_out())
    }

    /// Largest number of simultaneously live wires.
    pub fn peak_width(&self) -> usize {
        let mut live = self.n_in;
        let mut peak = live;
        for g in &self.gates {
            match g.kind {
                GateKind::Ancilla => {
                    live += 1;
                    peak = peak.max(live);
                }
                GateKind::Trace => live = live.saturating_sub(1),
                _ => {}
            }
        }
        peak
    }

    pub fn count(&self, pred: impl Fn(&GateKind) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(&g.kind)).count()
    }

    pub fn is_unitary_only(&self) -> bool {
        self.gates.iter().all(Gate::is_unitary)
    }

    /// Structural violations; empty iff the circuit is valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::Invalid(v)),
        }
    }

    /// Identity circuit on `n` wires.
    pub fn identity(name: impl Into<String>, n: usize) -> Circuit {
        Circuit::new(name, n)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_circuit(self))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceKind {
    /// Close Images: yes iff some pair of image states has fidelity ≥ a.
    #[serde(rename = "CI")]
    CloseImages,
    /// Circuit distinguishability: yes iff ‖Q0 − Q1‖⋄ ≥ a.
    #[serde(rename = "QCD")]
    Qcd,
}

/// A promise-problem instance: two circuits and thresholds `b < a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub q0: Circuit,
    pub q1: Circuit,
    pub kind: InstanceKind,
    pub a: f64,
    pub b: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    q0: String,
    q1: String,
    kind: InstanceKind,
    a: f64,
    b: f64,
}

impl ProblemInstance {
    pub fn new(q0: Circuit, q1: Circuit, kind: InstanceKind, a: f64, b: f64) -> Result<Self> {
        let inst = ProblemInstance { q0, q1, kind, a, b };
        inst.check()?;
        Ok(inst)
    }

    fn check(&self) -> Result<()> {
        self.q0.ensure_valid()?;
        self.q1.ensure_valid()?;
        if self.q0.kind() != self.q1.kind() {
            return Err(Error::Shape(format!(
                "circuits have different types {:?} and {:?}",
                self.q0.kind(),
                self.q1.kind()
            )));
        }
        let upper = match self.kind {
            InstanceKind::CloseImages => 1.0,
            InstanceKind::Qcd => 2.0,
        };
        if !(0.0 <= self.b && self.b < self.a && self.a <= upper) {
            return Err(Error::Domain(format!(
                "thresholds must satisfy 0 <= b < a <= {upper}, got a={}, b={}",
                self.a, self.b
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceJson = serde_json::from_str(text)?;
        let inst = ProblemInstance {
            q0: parse_circuit(&raw.q0)?,
            q1: parse_circuit(&raw.q1)?,
            kind: raw.kind,
            a: raw.a,
            b: raw.b,
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceJson {
            q0: serialize_circuit(&self.q0),
            q1: serialize_circuit(&self.q1),
            kind: self.kind,
            a: self.a,
            b: self.b,
        })
        .expect("instance serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_gates_are_unitary() {
        for g in StdGate::ALL {
            let m = g.matrix();
            let dev = (&m.adjoint() * &m).distance(&ComplexMatrix::identity(m.rows()));
            assert!(dev < 1e-15, "{g:?}");
            assert_eq!(m.rows(), 1 << g.arity());
        }
    }

    #[test]
    fn type_bookkeeping() {
        let c = Circuit::with_gates(
            "t",
            2,
            vec![Gate::ancilla(), Gate::trace(0), Gate::trace(0), Gate::ancilla()],
        );
        assert_eq!(c.kind(), (2, 2));
        assert_eq!(c.peak_width(), 3);
    }

    #[test]
    fn instance_checks_thresholds() {
        let q = Circuit::identity("id", 1);
        assert!(ProblemInstance::new(q.clone(), q.clone(), InstanceKind::CloseImages, 1.0, 0.25).is_ok());
        assert!(ProblemInstance::new(q.clone(), q.clone(), InstanceKind::CloseImages, 1.5, 0.25).is_err());
        assert!(ProblemInstance::new(q.clone(), q.clone(), InstanceKind::Qcd, 1.5, 0.25).is_ok());
        assert!(ProblemInstance::new(q.clone(), q.clone(), InstanceKind::Qcd, 0.2, 0.25).is_err());
        let other = Circuit::identity("id2", 2);
        assert!(ProblemInstance::new(q, other, InstanceKind::Qcd, 1.0, 0.5).is_err());
    }

    #[test]
    fn instance_json_round_trip() {
        let mut q1 = Circuit::identity("dephase", 1);
        q1.push(Gate::decohere(0));
        let inst =
            ProblemInstance::new(Circuit::identity("id", 1), q1, InstanceKind::Qcd, 1.0, 0.25).unwrap();
        let back = ProblemInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert!(inst.to_json().contains("\"kind\": \"QCD\""));
    }
}

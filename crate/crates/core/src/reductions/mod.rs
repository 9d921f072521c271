//! Circuit-to-circuit constructions: the controlled join of two dilations,
//! the reduction from image closeness to channel distinguishability, and the
//! amplifiers that push a distinguishability gap towards its extremes.

mod amplify;
mod polarize;

pub use amplify::{parity_mix, parity_mix_pairs, tensor_power};
pub use polarize::{polarize, Certificate, Interval, PolarizationParams, Polarized, StageCertificate, StageCounts};

use crate::circuit::{Circuit, Gate, GateKind, StdGate, MAX_ARITY};
use crate::error::{Error, Result};
use crate::numkernel::{check_qubits, ComplexMatrix};
use crate::simulator::{dilate, DilatedCircuit};

/// `|0⟩⟨0| ⊗ U + |1⟩⟨1| ⊗ I` when `on_one` is false, `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`
/// otherwise; the control is the most significant qubit.
fn controlled(u: &ComplexMatrix, on_one: bool) -> ComplexMatrix {
    let d = u.rows();
    let off = if on_one { d } else { 0 };
    let mut m = ComplexMatrix::identity(2 * d);
    for r in 0..d {
        for c in 0..d {
            m[(off + r, off + c)] = u[(r, c)];
        }
    }
    m
}

fn labelled(matrix: ComplexMatrix, wires: Vec<usize>) -> Gate {
    let label = StdGate::ALL
        .into_iter()
        .find(|g| g.arity() == wires.len() && g.matrix() == matrix);
    Gate {
        kind: GateKind::Unitary { matrix, label },
        wires,
    }
}

/// One unitary circuit running `p0` when a new control wire (wire 0) is `|0⟩`
/// and `p1` when it is `|1⟩`.
///
/// Both dilations are padded with idle wires to a common width and
/// canonicalized, so the result has its outputs on wires `1..=m` after the
/// control and the garbage on the remaining wires.
pub fn controlled_join(p0: &DilatedCircuit, p1: &DilatedCircuit) -> Result<DilatedCircuit> {
    if p0.n_in != p1.n_in || p0.n_out() != p1.n_out() {
        return Err(Error::Construction(format!(
            "cannot join dilations of type ({},{}) and ({},{})",
            p0.n_in,
            p0.n_out(),
            p1.n_in,
            p1.n_out()
        )));
    }
    let width = p0.width().max(p1.width());
    let branches = [
        p0.pad(width - p0.width()).canonical(),
        p1.pad(width - p1.width()).canonical(),
    ];
    let mut joined = Circuit::new(
        format!("{}_{}_joined", p0.unitary_circuit.name, p1.unitary_circuit.name),
        width + 1,
    );
    for (branch, d) in branches.iter().enumerate() {
        for g in &d.unitary_circuit.gates {
            let GateKind::Unitary { matrix, .. } = &g.kind else {
                return Err(Error::Internal("dilation contains a non-unitary gate".into()));
            };
            if g.arity() + 1 > MAX_ARITY {
                return Err(Error::Construction(format!(
                    "controlling a {}-qubit gate needs arity {}, above the limit of {MAX_ARITY}",
                    g.arity(),
                    g.arity() + 1
                )));
            }
            let wires = std::iter::once(0).chain(g.wires.iter().map(|w| w + 1)).collect();
            joined.push(labelled(controlled(matrix, branch == 1), wires));
        }
    }
    let m = p0.n_out();
    Ok(DilatedCircuit {
        unitary_circuit: joined,
        n_in: 1 + p0.n_in,
        k: width - p0.n_in,
        l: width - m,
        output_wires: (0..=m).collect(),
        garbage_wires: (m + 1..=width).collect(),
    })
}

pub(crate) fn same_kind(q0: &Circuit, q1: &Circuit) -> Result<(usize, usize)> {
    q0.ensure_valid()?;
    q1.ensure_valid()?;
    if q0.kind() != q1.kind() {
        return Err(Error::Shape(format!(
            "circuits `{}` of type {:?} and `{}` of type {:?}",
            q0.name,
            q0.kind(),
            q1.name,
            q1.kind()
        )));
    }
    Ok(q0.kind())
}

/// Maps a pair of circuits to a pair whose diamond distance equals the best
/// fidelity between their images.
///
/// `r0` runs the controlled join of both dilations on a control qubit
/// (wire 0) and the original inputs, then traces the original outputs; it
/// keeps the control and the garbage. `r1` additionally decoheres the control.
pub fn ci_to_qcd(q0: &Circuit, q1: &Circuit) -> Result<(Circuit, Circuit)> {
    let (n, m) = same_kind(q0, q1)?;
    let p = controlled_join(&dilate(q0)?, &dilate(q1)?)?;
    let width = p.width();
    check_qubits(1 + n + 1 + (width - 1 - m), "reduced channel")?;
    let mut r0 = Circuit::new(format!("{}_{}_r0", q0.name, q1.name), 1 + n);
    for _ in 0..p.k {
        r0.push(Gate::ancilla());
    }
    r0.gates.extend(p.unitary_circuit.gates.iter().cloned());
    for _ in 0..m {
        r0.push(Gate::trace(1));
    }
    let mut r1 = r0.clone();
    r1.name = format!("{}_{}_r1", q0.name, q1.name);
    r1.push(Gate::decohere(0));
    Ok((r0, r1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::numkernel::{c, tensor};
    use crate::random::random_unitary;
    use crate::simulator::{choi_of, run_unitary_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_gate(u: ComplexMatrix) -> Circuit {
        Circuit::with_gates("u", 1, vec![Gate::unitary(u, vec![0])])
    }

    fn unitary_of(circ: &Circuit) -> ComplexMatrix {
        let d = 1usize << circ.n_in;
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            let mut v = vec![c(0.0, 0.0); d];
            v[j] = c(1.0, 0.0);
            run_unitary_vector(circ, &mut v);
            for i in 0..d {
                m[(i, j)] = v[i];
            }
        }
        m
    }

    #[test]
    fn join_of_identities_is_identity() {
        let id = dilate(&Circuit::identity("id", 2)).unwrap();
        let j = controlled_join(&id, &id).unwrap();
        assert!(j.unitary_circuit.gates.is_empty());
        assert_eq!(j.width(), 3);
    }

    #[test]
    fn join_selects_branch_on_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let (u0, u1) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 2));
        let j = controlled_join(&dilate(&one_gate(u0.clone())).unwrap(), &dilate(&one_gate(u1.clone())).unwrap()).unwrap();
        let p = unitary_of(&j.unitary_circuit);
        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let expect = &tensor(&p0, &u0).unwrap() + &tensor(&p1, &u1).unwrap();
        assert!(p.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn x_on_the_one_branch_is_cnot() {
        let x = dilate(&one_gate(StdGate::X.matrix())).unwrap();
        let id = dilate(&Circuit::identity("id", 1)).unwrap();
        let j = controlled_join(&id, &x).unwrap();
        assert_eq!(j.unitary_circuit.gates, vec![Gate::std(StdGate::Cnot, vec![0, 1])]);
        // With X on the zero branch the gate fires when the control is |0⟩.
        let anti = controlled_join(&x, &id).unwrap();
        let m = unitary_of(&anti.unitary_circuit);
        let expect = ComplexMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(m.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn three_qubit_gates_cannot_be_controlled() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let c = Circuit::with_gates("w", 3, vec![Gate::unitary(random_unitary(&mut rng, 8), vec![0, 1, 2])]);
        let d = dilate(&c).unwrap();
        assert!(matches!(controlled_join(&d, &d), Err(Error::Construction(_))));
    }

    #[test]
    fn ci_to_qcd_structure() {
        let q = parse_circuit("circuit q inputs 1\nancilla\ngate CNOT 0 1\ntrace 1\nend").unwrap();
        let id = Circuit::identity("id", 1);
        let (r0, r1) = ci_to_qcd(&q, &id).unwrap();
        assert_eq!(r1.gates[..r1.gates.len() - 1], r0.gates[..]);
        assert_eq!(r1.gates.last(), Some(&Gate::decohere(0)));
        assert_eq!(r0.kind(), (2, 2));
        assert!(r0.validate().is_empty() && r1.validate().is_empty());
    }

    #[test]
    fn decohering_control_commutes_with_reduction() {
        // (D ⊗ I) ∘ R0 = R1 at the Choi level.
        let q0 = parse_circuit("circuit a inputs 1\ngate H 0\ndecohere 0\nend").unwrap();
        let q1 = parse_circuit("circuit b inputs 1\ngate T 0\nend").unwrap();
        let (r0, r1) = ci_to_qcd(&q0, &q1).unwrap();
        let mut composed = r0.clone();
        composed.push(Gate::decohere(0));
        let a = choi_of(&composed).unwrap();
        let b = choi_of(&r1).unwrap();
        assert!(a.choi().max_abs_diff(b.choi()) < 1e-9);
    }

    #[test]
    fn orthogonal_constants_reduce_to_equal_channels() {
        let zero = parse_circuit("circuit z inputs 1\ntrace 0\nancilla\nend").unwrap();
        let one = parse_circuit("circuit o inputs 1\ntrace 0\nancilla\ngate X 0\nend").unwrap();
        let (r0, r1) = ci_to_qcd(&zero, &one).unwrap();
        let a = choi_of(&r0).unwrap();
        let b = choi_of(&r1).unwrap();
        assert!(a.choi().max_abs_diff(b.choi()) < 1e-9);
    }
}

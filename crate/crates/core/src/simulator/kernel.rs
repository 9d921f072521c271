//! Index-level kernels for applying local operations to qubit registers.
//!
//! Qubit `q` of an `nq`-qubit register is bit `nq - 1 - q` of a basis index.

use num_complex::Complex64;

use crate::numkernel::ComplexMatrix;

/// Basis offsets of a gate's local states and the mask of the bits it touches.
fn offsets(wires: &[usize], nq: usize) -> (Vec<usize>, usize) {
    let k = wires.len();
    let masks: Vec<usize> = wires.iter().map(|&w| 1usize << (nq - 1 - w)).collect();
    let offs = (0..1usize << k)
        .map(|a| {
            (0..k)
                .filter(|j| a >> (k - 1 - j) & 1 == 1)
                .map(|j| masks[j])
                .sum()
        })
        .collect();
    (offs, masks.iter().sum())
}

/// Row block `M ← (U ⊗ I) M` where rows index an `nq`-qubit register and the
/// matrix has `cols` columns. A state vector is the case `cols = 1`.
pub(crate) fn apply_left(data: &mut [Complex64], nq: usize, cols: usize, u: &ComplexMatrix, wires: &[usize]) {
    let (offs, mask) = offsets(wires, nq);
    let d = offs.len();
    let mut buf = vec![Complex64::default(); d];
    for base in 0..1usize << nq {
        if base & mask != 0 {
            continue;
        }
        for c in 0..cols {
            for (b, off) in offs.iter().enumerate() {
                buf[b] = data[(base + off) * cols + c];
            }
            for (a, off) in offs.iter().enumerate() {
                let row = u.row(a);
                let mut acc = Complex64::default();
                for b in 0..d {
                    acc += row[b] * buf[b];
                }
                data[(base + off) * cols + c] = acc;
            }
        }
    }
}

/// `M ← M (U ⊗ I)†` on the column register.
pub(crate) fn apply_right_adjoint(data: &mut [Complex64], rows: usize, nq: usize, u: &ComplexMatrix, wires: &[usize]) {
    let (offs, mask) = offsets(wires, nq);
    let d = offs.len();
    let cols = 1usize << nq;
    let mut buf = vec![Complex64::default(); d];
    for r in 0..rows {
        let row = &mut data[r * cols..(r + 1) * cols];
        for base in 0..cols {
            if base & mask != 0 {
                continue;
            }
            for (b, off) in offs.iter().enumerate() {
                buf[b] = row[base + off];
            }
            for (a, off) in offs.iter().enumerate() {
                let urow = u.row(a);
                let mut acc = Complex64::default();
                for b in 0..d {
                    acc += buf[b] * urow[b].conj();
                }
                row[base + off] = acc;
            }
        }
    }
}

/// `X ← U X U†` on a square operator over `nq` qubits.
pub(crate) fn conjugate(x: &mut ComplexMatrix, nq: usize, u: &ComplexMatrix, wires: &[usize]) {
    let dim = 1usize << nq;
    apply_left(x.data_mut(), nq, dim, u, wires);
    apply_right_adjoint(x.data_mut(), dim, nq, u, wires);
}

/// Inserts a `|0⟩⟨0|` factor as qubit `pos` (0..=nq).
pub(crate) fn insert_zero(x: &ComplexMatrix, nq: usize, pos: usize) -> ComplexMatrix {
    let low_bits = nq - pos;
    let low_mask = (1usize << low_bits) - 1;
    let spread = |i: usize| ((i >> low_bits) << (low_bits + 1)) | (i & low_mask);
    let dim = 1usize << nq;
    let mut out = ComplexMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        let ni = spread(i);
        for j in 0..dim {
            out[(ni, spread(j))] = x[(i, j)];
        }
    }
    out
}

/// Traces out qubit `pos`.
pub(crate) fn trace_qubit(x: &ComplexMatrix, nq: usize, pos: usize) -> ComplexMatrix {
    let low_bits = nq - 1 - pos;
    let low_mask = (1usize << low_bits) - 1;
    let full = |i: usize, b: usize| ((i >> low_bits) << (low_bits + 1)) | (b << low_bits) | (i & low_mask);
    let dim = 1usize << (nq - 1);
    ComplexMatrix::from_fn(dim, dim, |i, j| x[(full(i, 0), full(j, 0))] + x[(full(i, 1), full(j, 1))])
}

/// Zeroes every entry whose row and column disagree on qubit `pos`.
pub(crate) fn decohere(x: &mut ComplexMatrix, nq: usize, pos: usize) {
    let bit = 1usize << (nq - 1 - pos);
    let dim = 1usize << nq;
    for i in 0..dim {
        for j in 0..dim {
            if (i ^ j) & bit != 0 {
                x[(i, j)] = Complex64::default();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::StdGate;
    use crate::numkernel::tensor;
    use crate::random::{random_matrix, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn embed(u: &ComplexMatrix, before: usize, after: usize) -> ComplexMatrix {
        let left = tensor(&ComplexMatrix::identity(1 << before), u).unwrap();
        tensor(&left, &ComplexMatrix::identity(1 << after)).unwrap()
    }

    #[test]
    fn conjugation_matches_dense_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let u = random_unitary(&mut rng, 4);
        let x = random_matrix(&mut rng, 16, 16);
        let mut y = x.clone();
        conjugate(&mut y, 4, &u, &[1, 2]);
        let big = embed(&u, 1, 1);
        let expect = &(&big * &x) * &big.adjoint();
        assert!(y.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn reversed_wires_match_swapped_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = random_matrix(&mut rng, 4, 4);
        let cnot = StdGate::Cnot.matrix();
        let mut y = x.clone();
        conjugate(&mut y, 2, &cnot, &[1, 0]);
        // CNOT with control on qubit 1 = SWAP · CNOT · SWAP.
        let sw = crate::circuit::swap_matrix();
        let g = &(&sw * &cnot) * &sw;
        let expect = &(&g * &x) * &g.adjoint();
        assert!(y.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn insert_then_trace_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let x = random_matrix(&mut rng, 8, 8);
        for pos in 0..=3 {
            let big = insert_zero(&x, 3, pos);
            assert!(trace_qubit(&big, 4, pos).max_abs_diff(&x) < 1e-15);
        }
        let at_end = insert_zero(&x, 3, 3);
        let mut zero = ComplexMatrix::zeros(2, 2);
        zero[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(at_end.max_abs_diff(&tensor(&x, &zero).unwrap()) < 1e-15);
    }

    #[test]
    fn trace_qubit_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x = random_matrix(&mut rng, 8, 8);
        let expect = crate::numkernel::partial_trace(&x, &[2, 2, 2], &[0, 2]).unwrap();
        assert!(trace_qubit(&x, 3, 1).max_abs_diff(&expect) < 1e-14);
    }
}

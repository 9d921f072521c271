//! Random matrices, states and channels drawn from standard ensembles.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate};
use crate::numkernel::{ComplexMatrix, DensityMatrix, StateVector};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. complex Gaussian entries (Ginibre ensemble).
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Haar-random unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(s) = StateVector::normalized(v) {
            return s;
        }
    }
}

/// Density matrix from the induced measure `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim, dim);
    let p = (&g * &g.adjoint()).hermitian_part();
    let tr = p.trace().re;
    DensityMatrix::from_raw(p.scale_real(1.0 / tr))
}

/// Density matrix of rank at most `rank`.
pub fn random_density_of_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim, rank.max(1));
    let p = (&g * &g.adjoint()).hermitian_part();
    let tr = p.trace().re;
    DensityMatrix::from_raw(p.scale_real(1.0 / tr))
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let cols = orthonormal_columns(rng, n, n);
    ComplexMatrix::from_fn(n, n, |r, c| cols[c][r])
}

/// Orthogonal projector onto a random `rank`-dimensional subspace.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let cols = orthonormal_columns(rng, n, rank.min(n));
    let mut p = ComplexMatrix::zeros(n, n);
    for v in &cols {
        p = &p + &ComplexMatrix::outer(v, v);
    }
    p.hermitian_part()
}

fn orthonormal_columns<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|z| *z /= norm);
            cols.push(v);
        }
    }
    cols
}

/// Random Kraus family `{A_k}` with `Σ A_k† A_k = I`, built from a random
/// isometry `d_in → d_out · count`.
pub fn random_kraus<R: Rng + ?Sized>(
    rng: &mut R,
    d_in: usize,
    d_out: usize,
    count: usize,
) -> Vec<ComplexMatrix> {
    let big = d_out * count;
    assert!(big >= d_in, "isometry needs d_out * count >= d_in");
    let u = random_unitary(rng, big);
    (0..count)
        .map(|k| ComplexMatrix::from_fn(d_out, d_in, |o, i| u[(k * d_out + o, i)]))
        .collect()
}

/// Random circuit of type `(n, n)`: `ancillas` fresh wires, `layers` of
/// Haar-random two-qubit gates on neighbouring wires, an optional
/// decoherence on a random wire, and the ancillas traced out again.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    ancillas: usize,
    layers: usize,
    decohere: bool,
) -> Circuit {
    let width = n + ancillas;
    assert!(width >= 1, "random circuit needs at least one wire");
    let mut c = Circuit::new("random", n);
    for _ in 0..ancillas {
        c.push(Gate::ancilla());
    }
    for layer in 0..layers {
        if width == 1 {
            c.push(Gate::unitary(random_unitary(rng, 2), vec![0]));
            continue;
        }
        let mut w = layer % 2;
        while w + 1 < width {
            c.push(Gate::unitary(random_unitary(rng, 4), vec![w, w + 1]));
            w += 2;
        }
        if layer == 0 && width % 2 == 1 {
            c.push(Gate::unitary(random_unitary(rng, 4), vec![width - 2, width - 1]));
        }
    }
    if decohere {
        c.push(Gate::decohere(rng.random_range(0..width)));
    }
    for w in (n..width).rev() {
        c.push(Gate::trace(w));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_circuits_are_valid_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for (n, k) in [(1, 1), (1, 2), (2, 1), (3, 0)] {
            let c = random_circuit(&mut rng, n, k, 2, true);
            assert!(c.validate().is_empty(), "{c}");
            assert_eq!(c.kind(), (n, n));
            let ch = crate::simulator::choi_of(&c).unwrap();
            assert!(ch.trace_preservation_defect() < 1e-10);
        }
    }

    #[test]
    fn kraus_families_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let k = random_kraus(&mut rng, 2, 4, 3);
        let mut sum = ComplexMatrix::zeros(2, 2);
        for a in &k {
            sum = &sum + &(&a.adjoint() * a);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }
}

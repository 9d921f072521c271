use nalgebra::linalg::{SymmetricEigen, SVD};
use num_complex::Complex64;

use super::{ComplexMatrix, TOL_HERM, TOL_PSD};
use crate::error::{Error, Result};

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: ComplexMatrix,
}

impl Spectral {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.col(k)
    }

    /// `V f(Λ) V†`.
    pub fn rebuild_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(v.rows(), v.rows(), |r, c| {
            (0..n)
                .filter(|&k| weights[k] != 0.0)
                .map(|k| v[(r, k)] * v[(c, k)].conj() * weights[k])
                .sum()
        })
    }
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// factoring; anything further than `TOL_HERM` from Hermitian is rejected.
pub fn spectral(h: &ComplexMatrix) -> Result<Spectral> {
    if !h.is_square() {
        return Err(Error::Shape(format!(
            "spectral decomposition of a {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermitian_defect();
    if defect > TOL_HERM {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(spectral_unchecked(&h.hermitian_part()))
}

pub(crate) fn spectral_unchecked(h: &ComplexMatrix) -> Spectral {
    let n = h.rows();
    if n == 0 {
        return Spectral {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Spectral { values, vectors }
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
pub(crate) fn top_eigenvector(h: &ComplexMatrix) -> Vec<Complex64> {
    spectral_unchecked(h).vector(0)
}

/// Thin singular value decomposition `X = U diag(s) V†`, values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(x: &ComplexMatrix) -> Svd {
    let k = x.rows().min(x.cols());
    if k == 0 {
        return Svd {
            u: ComplexMatrix::zeros(x.rows(), 0),
            values: vec![],
            v: ComplexMatrix::zeros(x.cols(), 0),
        };
    }
    let d = SVD::new(x.to_nalgebra(), true, true);
    let u = d.u.expect("requested U");
    let v_t = d.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| d.singular_values[b].total_cmp(&d.singular_values[a]).then(a.cmp(&b)));
    Svd {
        u: ComplexMatrix::from_fn(x.rows(), k, |r, c| u[(r, order[c])]),
        values: order.iter().map(|&i| d.singular_values[i]).collect(),
        // v_t holds V† row-wise.
        v: ComplexMatrix::from_fn(x.cols(), k, |r, c| v_t[(order[c], r)].conj()),
    }
}

/// Singular values in descending order.
pub fn singular_values(x: &ComplexMatrix) -> Vec<f64> {
    let k = x.rows().min(x.cols());
    if k == 0 {
        return vec![];
    }
    let d = SVD::new(x.to_nalgebra(), false, false);
    let mut s: Vec<f64> = d.singular_values.iter().map(|v| v.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Positive square root of a positive semidefinite matrix. Eigenvalues in
/// `[-TOL_PSD, 0)` are treated as zero; positive ones, however small, are
/// kept so that the root stays continuous in its argument.
pub fn psd_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sp = spectral(p)?;
    if let Some(&worst) = sp.values.last() {
        if worst < -TOL_PSD {
            return Err(Error::Domain(format!(
                "matrix has negative eigenvalue {worst:.3e}"
            )));
        }
    }
    Ok(sp.rebuild_with(|l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;
    use crate::random::{random_density, random_hermitian, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn diagonal_spectrum() {
        let sp = spectral(&ComplexMatrix::from_real_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(sp.values, vec![3.0, 1.0]);
        assert!((sp.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((sp.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let sp = spectral(&pauli_x()).unwrap();
        assert!((sp.values[0] - 1.0).abs() < 1e-14);
        assert!((sp.values[1] + 1.0).abs() < 1e-14);
        let plus = sp.vector(0);
        // |+⟩ up to phase
        let overlap = (plus[0] + plus[1]).norm() / 2f64.sqrt();
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(&mut rng, 8);
        let sp = spectral(&h).unwrap();
        assert!(sp.rebuild_with(|l| l).distance(&h) <= 1e-10);
        let v = &sp.vectors;
        assert!((&v.adjoint() * v).distance(&ComplexMatrix::identity(8)) <= 1e-10);
        assert!(sp.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(spectral(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_singular_values() {
        assert_eq!(singular_values(&ComplexMatrix::identity(3)), vec![1.0; 3]);
    }

    #[test]
    fn signed_diagonal_singular_values() {
        let s = singular_values(&ComplexMatrix::from_real_diag(&[2.0, -3.0]));
        assert!((s[0] - 3.0).abs() < 1e-15 && (s[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_value_sum_matches_sqrt_gram_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random_matrix(&mut rng, 4, 4);
        let sum: f64 = singular_values(&x).iter().sum();
        let gram = &x.adjoint() * &x;
        let oracle = psd_sqrt(&gram.hermitian_part()).unwrap().trace().re;
        assert!((sum - oracle).abs() < 1e-10, "{sum} vs {oracle}");
    }

    #[test]
    fn rectangular_singular_value_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_matrix(&mut rng, 2, 5);
        assert_eq!(singular_values(&x).len(), 2);
        let d = svd(&x);
        let rebuilt = &(&d.u * &ComplexMatrix::from_real_diag(&d.values)) * &d.v.adjoint();
        assert!(rebuilt.distance(&x) < 1e-12);
    }

    #[test]
    fn hermitian_singular_values_are_absolute_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let h = random_hermitian(&mut rng, 6);
        let mut abs: Vec<f64> = spectral(&h).unwrap().values.iter().map(|l| l.abs()).collect();
        abs.sort_by(|a, b| b.total_cmp(a));
        let sv = singular_values(&h);
        for (a, b) in abs.iter().zip(&sv) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        let i = ComplexMatrix::identity(3);
        assert!(psd_sqrt(&i).unwrap().max_abs_diff(&i) < 1e-15);
        let d = psd_sqrt(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(d.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_density(&mut rng, 4);
        let root = psd_sqrt(rho.matrix()).unwrap();
        assert!((&root * &root).distance(rho.matrix()) <= 1e-10);
        assert!(root.is_hermitian(1e-12));
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large() {
        let tiny = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        let r = psd_sqrt(&tiny).unwrap();
        assert_eq!(r[(1, 1)], c(0.0, 0.0));
        assert!(psd_sqrt(&ComplexMatrix::from_real_diag(&[1.0, -0.1])).is_err());
    }
}

//! Dense complex linear algebra used by every other module.
//!
//! Matrices are row-major [`ComplexMatrix`] values. Multi-qubit operators use a
//! big-endian convention: qubit 0 is the most significant bit of a basis index,
//! so `a.tensor(&b)` places `a` on the leading qubits.
//!
//! Eigen- and singular-value decompositions delegate to `nalgebra`; the rest is
//! index arithmetic done here.

mod linalg;
mod matrix;
mod states;

pub(crate) use linalg::top_eigenvector;
pub use linalg::{psd_sqrt, singular_values, spectral, svd, Spectral, Svd};
pub use matrix::{partial_trace, tensor, ComplexMatrix};
pub use states::{DensityMatrix, StateVector};

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub use num_complex::Complex64;

/// Hermiticity tolerance.
pub const TOL_HERM: f64 = 1e-9;
/// Slack allowed below zero for eigenvalues of positive semidefinite operators.
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_TRACE: f64 = 1e-9;
pub const TOL_NORM: f64 = 1e-9;
/// Reconstruction tolerance for factorizations.
pub const TOL_RECON: f64 = 1e-10;

pub const DEFAULT_DIM_CAP: usize = 4096;

static DIM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIM_CAP);

/// Largest matrix side any operation may allocate.
pub fn dim_cap() -> usize {
    DIM_CAP.load(Ordering::Relaxed)
}

/// Changes the process-wide dimension cap. Intended to be called once at startup.
pub fn set_dim_cap(cap: usize) {
    DIM_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_dim(dim: usize, what: &str) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        return Err(Error::size(what, dim, cap));
    }
    Ok(())
}

/// Checks that a register of `qubits` qubits fits under the cap as a matrix side.
pub(crate) fn check_qubits(qubits: usize, what: &str) -> Result<()> {
    let cap = dim_cap();
    if qubits >= usize::BITS as usize - 1 || (1usize << qubits) > cap {
        return Err(Error::size(what, format!("2^{qubits}"), cap));
    }
    Ok(())
}

pub(crate) const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

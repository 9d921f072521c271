//! Distances between states and between channels.
//!
//! State-level measures (trace norm, fidelity, Helstrom measurement) are
//! closed-form; the channel-level diamond norm and maximum image fidelity are
//! computed by alternating local ascent with random restarts, so both return
//! certified lower bounds together with the witnesses that achieve them.

mod diamond;
mod image;

pub use diamond::{diamond_norm, diamond_norm_with_reference, seesaw, DiamondWitness, DiffMap, OptimizerConfig, SeesawRun};
pub use image::{max_image_fidelity, max_image_fidelity_channels, ImageFidelity};

use crate::error::{Error, Result};
use crate::numkernel::{psd_sqrt, singular_values, spectral, ComplexMatrix, DensityMatrix, StateVector};

/// Eigenvalues within this distance of zero are left out of Helstrom projectors.
pub const HELSTROM_TOL: f64 = 1e-9;

/// Sum of the singular values.
pub fn trace_norm(x: &ComplexMatrix) -> f64 {
    singular_values(x).iter().sum()
}

/// `‖ρ − ξ‖_tr` for two states of equal dimension.
pub fn trace_distance(rho: &DensityMatrix, xi: &DensityMatrix) -> Result<f64> {
    same_dim(rho.dim(), xi.dim())?;
    Ok(trace_norm(&(rho.matrix() - xi.matrix())))
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("states of dimension {a} and {b}")));
    }
    Ok(())
}

/// `F(ρ, ξ) = tr√(√ρ ξ √ρ)`, evaluated as `‖√ρ √ξ‖_tr` and clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, xi: &DensityMatrix) -> Result<f64> {
    same_dim(rho.dim(), xi.dim())?;
    let a = psd_sqrt(rho.matrix())?;
    let b = psd_sqrt(xi.matrix())?;
    Ok(trace_norm(&(&a * &b)).clamp(0.0, 1.0))
}

/// Fidelity of the reduced states of two purifications.
///
/// Both vectors live on `system ⊗ purifying` with the system factor of
/// dimension `dim_system` first. The reduced states are the marginals on the
/// system; the value is `‖tr_system |ψ⟩⟨φ|‖_tr`, an operator on the purifying
/// space.
pub fn fidelity_via_purification(psi: &StateVector, phi: &StateVector, dim_system: usize) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(Error::Shape(format!(
            "purifications of dimension {} and {}",
            psi.dim(),
            phi.dim()
        )));
    }
    let a = psi.as_matrix(dim_system)?;
    let b = phi.as_matrix(dim_system)?;
    // tr_system |ψ⟩⟨φ| = Aᵀ conj(B); its trace norm equals that of B† A.
    Ok(trace_norm(&(&b.adjoint() * &a)).clamp(0.0, 1.0))
}

/// The optimal projective measurement for telling apart two equiprobable
/// states whose difference is `delta`.
#[derive(Clone, Debug)]
pub struct Helstrom {
    /// Projector onto the strictly positive eigenspace of `delta`.
    pub m: ComplexMatrix,
    /// `2·tr(m·delta) − tr(delta)`, which equals `‖delta‖_tr`.
    pub value: f64,
}

pub fn helstrom(delta: &ComplexMatrix) -> Result<Helstrom> {
    let sp = spectral(delta)?;
    let m = sp.rebuild_with(|l| if l > HELSTROM_TOL { 1.0 } else { 0.0 });
    let value = sp.values.iter().map(|l| l.abs()).sum();
    Ok(Helstrom { m, value })
}

/// Probability that measurement `{m, I − m}` names the state correctly when
/// `ρ0`, `ρ1` are prepared with equal probability.
pub fn success_probability(m: &ComplexMatrix, rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    same_dim(rho0.dim(), rho1.dim())?;
    same_dim(m.rows(), rho0.dim())?;
    let p0 = m.trace_product(rho0.matrix()).re;
    let p1 = 1.0 - m.trace_product(rho1.matrix()).re;
    Ok(0.5 * p0 + 0.5 * p1)
}

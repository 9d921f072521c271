use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{spectral, ComplexMatrix, TOL_HERM, TOL_NORM, TOL_PSD, TOL_TRACE};
use crate::error::{Error, Result};

/// A qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let dim = mat.rows();
        if !mat.is_square() || !dim.is_power_of_two() {
            return Err(Error::Shape(format!(
                "density matrix must be square with power-of-two side, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let defect = mat.hermitian_defect();
        if defect > TOL_HERM {
            return Err(Error::Domain(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::Domain(format!("density matrix trace is {tr}")));
        }
        let sp = spectral(&mat)?;
        if let Some(&low) = sp.values.last() {
            if low < -TOL_PSD {
                return Err(Error::Domain(format!(
                    "density matrix has negative eigenvalue {low:.3e}"
                )));
            }
        }
        Ok(DensityMatrix { mat })
    }

    pub(crate) fn from_raw(mat: ComplexMatrix) -> Self {
        DensityMatrix { mat }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &StateVector) -> Self {
        DensityMatrix {
            mat: ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()),
        }
    }

    /// Computational basis state `|index⟩⟨index|` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Self {
        let dim = 1usize << qubits;
        let mut mat = ComplexMatrix::zeros(dim, dim);
        mat[(index, index)] = Complex64::new(1.0, 0.0);
        DensityMatrix { mat }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        DensityMatrix {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    qubits: usize,
    #[serde(flatten)]
    matrix: ComplexMatrix,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateFile {
            qubits: self.qubits(),
            matrix: self.mat.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = StateFile::deserialize(deserializer)?;
        if file.matrix.rows() != 1usize << file.qubits {
            return Err(serde::de::Error::custom(format!(
                "\"qubits\" is {} but matrix side is {}",
                file.qubits,
                file.matrix.rows()
            )));
        }
        DensityMatrix::new(file.matrix).map_err(serde::de::Error::custom)
    }
}

/// A unit vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::Domain(format!("state vector has norm {norm}")));
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(StateVector { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::pure(self)
    }

    /// Reshapes `|ψ⟩ ∈ A ⊗ B` into the `dim_a × dim_b` coefficient matrix.
    pub fn as_matrix(&self, dim_a: usize) -> Result<ComplexMatrix> {
        if dim_a == 0 || !self.dim().is_multiple_of(dim_a) {
            return Err(Error::Shape(format!(
                "cannot split a {}-dimensional vector with leading factor {dim_a}",
                self.dim()
            )));
        }
        ComplexMatrix::new(dim_a, self.dim() / dim_a, self.amplitudes.clone())
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let amplitudes = Vec::<Complex64>::deserialize(deserializer)?;
        StateVector::new(amplitudes).map_err(serde::de::Error::custom)
    }
}

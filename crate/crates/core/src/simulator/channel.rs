use num_complex::Complex64;

use super::{check_vector_qubits, dilate, run_unitary_vector};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::numkernel::{check_qubits, partial_trace, spectral, ComplexMatrix, TOL_PSD};

/// Choi eigenvalues at or below this are dropped when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-12;

/// Tolerance for the complete-positivity and trace-preservation checks.
const CHANNEL_TOL: f64 = 1e-9;

/// A completely positive trace-preserving map from `n_in` to `n_out` qubits.
///
/// The Choi matrix is `J = Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first and
/// unnormalized, so `J[(o,i),(o',i')] = ⟨o|Φ(|i⟩⟨i'|)|o'⟩`.
#[derive(Clone, Debug)]
pub struct Channel {
    n_in: usize,
    n_out: usize,
    choi: ComplexMatrix,
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    /// Builds a channel from its Choi matrix, checking complete positivity and
    /// trace preservation.
    pub fn from_choi(n_in: usize, n_out: usize, choi: ComplexMatrix) -> Result<Channel> {
        check_qubits(n_in + n_out, "Choi matrix")?;
        let dim = 1usize << (n_in + n_out);
        if !choi.is_square() || choi.rows() != dim {
            return Err(Error::Shape(format!(
                "Choi matrix of a ({n_in},{n_out}) channel must be {dim}x{dim}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        let kraus = kraus_from_choi(n_in, n_out, &choi)?;
        let ch = Channel {
            n_in,
            n_out,
            choi: choi.hermitian_part(),
            kraus,
        };
        let tp = ch.trace_preservation_defect();
        if tp > CHANNEL_TOL {
            return Err(Error::Domain(format!(
                "map is not trace preserving (defect {tp:.3e})"
            )));
        }
        Ok(ch)
    }

    /// Builds a channel from Kraus operators of shape `2^n_out × 2^n_in`.
    pub fn from_kraus(n_in: usize, n_out: usize, kraus: &[ComplexMatrix]) -> Result<Channel> {
        let (d_in, d_out) = (1usize << n_in, 1usize << n_out);
        if kraus.is_empty() {
            return Err(Error::Shape("empty Kraus family".into()));
        }
        for a in kraus {
            if a.rows() != d_out || a.cols() != d_in {
                return Err(Error::Shape(format!(
                    "Kraus operator is {}x{}, expected {d_out}x{d_in}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        check_qubits(n_in + n_out, "Choi matrix")?;
        let dim = d_in * d_out;
        let mut choi = ComplexMatrix::zeros(dim, dim);
        for a in kraus {
            // vec(A)[o*d_in + i] = A[o,i]
            let v = a.data();
            for r in 0..dim {
                if v[r] == Complex64::default() {
                    continue;
                }
                for c in 0..dim {
                    choi[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Channel::from_choi(n_in, n_out, choi)
    }

    pub fn identity(n: usize) -> Channel {
        Channel::from_kraus(n, n, &[ComplexMatrix::identity(1 << n)]).expect("identity is a channel")
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn d_in(&self) -> usize {
        1 << self.n_in
    }

    pub fn d_out(&self) -> usize {
        1 << self.n_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `‖tr_out J − I‖_max`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let reduced = partial_trace(&self.choi, &[self.d_out(), self.d_in()], &[1]).expect("choi dims");
        reduced.max_abs_diff(&ComplexMatrix::identity(self.d_in()))
    }

    /// `‖Σ A†A − I‖_max`.
    pub fn kraus_completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in(), self.d_in());
        for a in &self.kraus {
            sum = &sum + &(&a.adjoint() * a);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.d_in()))
    }

    /// `Σ_k A_k ρ A_k†` evaluated directly from the Choi matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply_extended(rho, 1)
    }

    /// `(Φ ⊗ I_R)(x)` for `x` on input ⊗ reference with reference dimension
    /// `ref_dim`, computed by contracting the Choi matrix.
    pub fn apply_extended(&self, x: &ComplexMatrix, ref_dim: usize) -> Result<ComplexMatrix> {
        contract_forward(&self.choi, self.d_out(), self.d_in(), ref_dim, x)
    }

    /// `(Φ† ⊗ I_R)(m)` for `m` on output ⊗ reference, from the Choi matrix.
    pub fn adjoint_extended(&self, m: &ComplexMatrix, ref_dim: usize) -> Result<ComplexMatrix> {
        contract_adjoint(&self.choi, self.d_out(), self.d_in(), ref_dim, m)
    }

    /// Tensor product channel `self ⊗ other`.
    pub fn tensor(&self, other: &Channel) -> Result<Channel> {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.tensor(b)?);
            }
        }
        Channel::from_kraus(self.n_in + other.n_in, self.n_out + other.n_out, &kraus)
    }

    /// Convex combination `p·self + (1−p)·other` of channels of equal type.
    pub fn mix(&self, other: &Channel, p: f64) -> Result<Channel> {
        if self.n_in != other.n_in || self.n_out != other.n_out {
            return Err(Error::Shape("mixing channels of different types".into()));
        }
        let choi = &self.choi.scale_real(p) + &other.choi.scale_real(1.0 - p);
        Channel::from_choi(self.n_in, self.n_out, choi)
    }
}

/// `Δ[(o,r),(o',r')] = Σ_{i,i'} J[(o,i),(o',i')] X[(i,r),(i',r')]`.
pub(crate) fn contract_forward(
    j: &ComplexMatrix,
    d_out: usize,
    d_in: usize,
    d_ref: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = d_in * d_ref;
    if !x.is_square() || x.rows() != n {
        return Err(Error::Shape(format!(
            "operator must be {n}x{n} (input {d_in} x reference {d_ref}), got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let dout_ref = d_out * d_ref;
    let mut out = ComplexMatrix::zeros(dout_ref, dout_ref);
    let od = out.data_mut();
    for o in 0..d_out {
        for i in 0..d_in {
            let jrow = o * d_in + i;
            for op in 0..d_out {
                for ip in 0..d_in {
                    let w = j[(jrow, op * d_in + ip)];
                    if w == Complex64::default() {
                        continue;
                    }
                    for r in 0..d_ref {
                        let xrow = x.row(i * d_ref + r);
                        let dst = (o * d_ref + r) * dout_ref + op * d_ref;
                        let src = &xrow[ip * d_ref..(ip + 1) * d_ref];
                        for (t, s) in od[dst..dst + d_ref].iter_mut().zip(src) {
                            *t += w * s;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `K[(i',r'),(i,r)] = Σ_{o,o'} M[(o',r'),(o,r)] J[(o,i),(o',i')]`, the dual of
/// [`contract_forward`] with respect to `tr(M·)`.
pub(crate) fn contract_adjoint(
    j: &ComplexMatrix,
    d_out: usize,
    d_in: usize,
    d_ref: usize,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let dout_ref = d_out * d_ref;
    if !m.is_square() || m.rows() != dout_ref {
        return Err(Error::Shape(format!(
            "operator must be {dout_ref}x{dout_ref} (output {d_out} x reference {d_ref}), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = d_in * d_ref;
    let mut out = ComplexMatrix::zeros(n, n);
    let od = out.data_mut();
    for o in 0..d_out {
        for i in 0..d_in {
            for op in 0..d_out {
                for ip in 0..d_in {
                    let w = j[(o * d_in + i, op * d_in + ip)];
                    if w == Complex64::default() {
                        continue;
                    }
                    for rp in 0..d_ref {
                        let mrow = m.row(op * d_ref + rp);
                        let dst = (ip * d_ref + rp) * n + i * d_ref;
                        let src = &mrow[o * d_ref..(o + 1) * d_ref];
                        for (t, s) in od[dst..dst + d_ref].iter_mut().zip(src) {
                            *t += w * s;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn kraus_from_choi(n_in: usize, n_out: usize, choi: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let (d_in, d_out) = (1usize << n_in, 1usize << n_out);
    let sp = spectral(choi)?;
    if let Some(&low) = sp.values.last() {
        if low < -TOL_PSD {
            return Err(Error::NotCompletelyPositive(low));
        }
    }
    Ok(sp
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > KRAUS_CUTOFF)
        .map(|(k, &l)| {
            let s = l.sqrt();
            let v = sp.vector(k);
            ComplexMatrix::from_fn(d_out, d_in, |o, i| v[o * d_in + i] * s)
        })
        .collect())
}

/// Kraus operators from the Choi eigendecomposition.
pub fn kraus_of(ch: &Channel) -> Result<Vec<ComplexMatrix>> {
    kraus_from_choi(ch.n_in, ch.n_out, &ch.choi)
}

/// `Φ†(M) = Σ_k A_k† M A_k`.
pub fn adjoint_apply(ch: &Channel, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != ch.d_out() {
        return Err(Error::Shape(format!(
            "adjoint of a ({},{}) channel takes a {2}x{2} operator, got {3}x{4}",
            ch.n_in,
            ch.n_out,
            ch.d_out(),
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(ch.d_in(), ch.d_in());
    for a in &ch.kraus {
        out = &out + &(&(&a.adjoint() * m) * a);
    }
    Ok(out)
}

/// Superoperator of a circuit, obtained by running each input basis state
/// through the circuit's unitary dilation.
pub fn choi_of(c: &Circuit) -> Result<Channel> {
    c.ensure_valid()?;
    let (n_in, n_out) = c.kind();
    check_qubits(n_in + n_out, &format!("Choi matrix of `{}`", c.name))?;
    let dil = dilate(c)?;
    let width = dil.width();
    check_vector_qubits(width, &format!("dilation of `{}`", c.name))?;

    let (d_in, d_out) = (1usize << n_in, 1usize << n_out);
    let d_g = 1usize << dil.l;
    // Split each basis index of the dilated register into (output, garbage).
    let bit = |x: usize, w: usize| (x >> (width - 1 - w)) & 1;
    let split: Vec<(usize, usize)> = (0..1usize << width)
        .map(|x| {
            let o = dil.output_wires.iter().fold(0, |acc, &w| acc << 1 | bit(x, w));
            let g = dil.garbage_wires.iter().fold(0, |acc, &w| acc << 1 | bit(x, w));
            (o, g)
        })
        .collect();

    let rows = d_out * d_in;
    let mut w = ComplexMatrix::zeros(rows, d_g);
    let mut psi = vec![Complex64::default(); 1usize << width];
    for i in 0..d_in {
        psi.iter_mut().for_each(|z| *z = Complex64::default());
        psi[i << dil.k] = Complex64::new(1.0, 0.0);
        run_unitary_vector(&dil.unitary_circuit, &mut psi);
        for (x, &amp) in psi.iter().enumerate() {
            if amp != Complex64::default() {
                let (o, g) = split[x];
                w[(o * d_in + i, g)] = amp;
            }
        }
    }
    let choi = &w * &w.adjoint();
    Channel::from_choi(n_in, n_out, choi).map_err(|e| {
        Error::Internal(format!("Choi matrix of `{}` failed admissibility: {e}", c.name))
    })
}

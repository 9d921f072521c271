use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::diamond::best_index;
use super::{fidelity, OptimizerConfig};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::numkernel::{check_dim, svd, tensor, ComplexMatrix, DensityMatrix};
use crate::random::random_state;
use crate::simulator::{choi_of, Channel};

/// Best pair of inputs found for making two channels' outputs overlap.
#[derive(Clone, Debug, Serialize)]
pub struct ImageFidelity {
    /// `F(Q0(ρ0), Q1(ρ1))` for the returned inputs.
    pub value: f64,
    pub rho0: DensityMatrix,
    pub rho1: DensityMatrix,
    pub converged: bool,
    pub restarts_used: usize,
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// Lower bound on `max F(Q0(ρ0), Q1(ρ1))` over all input states.
pub fn max_image_fidelity(q0: &Circuit, q1: &Circuit, cfg: &OptimizerConfig) -> Result<ImageFidelity> {
    max_image_fidelity_channels(&choi_of(q0)?, &choi_of(q1)?, cfg)
}

/// Stinespring isometries of both channels on a shared environment.
struct Isometries {
    d_in: usize,
    d_out: usize,
    d_env: usize,
    /// `(V_c ⊗ I_R)` with rows `(o, e, r)` and columns `(i, r)`.
    w: [ComplexMatrix; 2],
}

impl Isometries {
    fn new(ch0: &Channel, ch1: &Channel) -> Result<Isometries> {
        let (d_in, d_out) = (ch0.d_in(), ch0.d_out());
        let d_env = ch0.kraus().len().max(ch1.kraus().len());
        check_dim(d_out * d_env * d_in, "purified output")?;
        let iso = |ch: &Channel| -> Result<ComplexMatrix> {
            let k = ch.kraus();
            let v = ComplexMatrix::from_fn(d_out * d_env, d_in, |row, i| {
                let (o, e) = (row / d_env, row % d_env);
                k.get(e).map_or(Complex64::default(), |a| a[(o, i)])
            });
            tensor(&v, &ComplexMatrix::identity(d_in))
        };
        Ok(Isometries {
            d_in,
            d_out,
            d_env,
            w: [iso(ch0)?, iso(ch1)?],
        })
    }

    /// Output purification as a matrix `[o, (e, r)]`.
    fn image(&self, c: usize, psi: &[Complex64]) -> ComplexMatrix {
        let phi = self.w[c].matvec(psi);
        let g = self.d_env * self.d_in;
        ComplexMatrix::from_fn(self.d_out, g, |o, j| phi[o * g + j])
    }
}

struct Run {
    value: f64,
    psi: [Vec<Complex64>; 2],
    history: Vec<f64>,
    converged: bool,
}

/// Alternates between the best purifying-space unitary for the current pair
/// of inputs (a polar decomposition) and the best pair of inputs for that
/// unitary (a top singular pair). Neither step lowers the overlap.
fn ascend(iso: &Isometries, start: [Vec<Complex64>; 2], cfg: &OptimizerConfig) -> Run {
    let [mut psi0, mut psi1] = start;
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    loop {
        let phi0 = iso.image(0, &psi0);
        let phi1 = iso.image(1, &psi1);
        // Y[g', g] = Σ_o φ1[o, g'] conj(φ0[o, g]);  max_U |tr(U Y)| = ‖Y‖_tr.
        let y = &phi1.transpose() * &phi0.conj();
        let dec = svd(&y);
        let value: f64 = dec.values.iter().sum();
        if let Some(&prev) = history.last() {
            history.push(value);
            if cfg.stalled(prev, value) {
                converged = true;
                break;
            }
        } else {
            history.push(value);
        }
        if history.len() > cfg.max_iters {
            break;
        }
        let u = &dec.v * &dec.u.adjoint();
        let big_u = tensor(&ComplexMatrix::identity(iso.d_out), &u).expect("bounded by isometry size");
        let t = &(&iso.w[0].adjoint() * &big_u) * &iso.w[1];
        let top = svd(&t);
        psi0 = top.u.col(0);
        psi1 = top.v.col(0);
    }
    Run {
        value: *history.last().expect("at least one evaluation"),
        psi: [psi0, psi1],
        history,
        converged,
    }
}

fn marginal(psi: &[Complex64], d_in: usize) -> DensityMatrix {
    let a = ComplexMatrix::from_fn(d_in, d_in, |i, r| psi[i * d_in + r]);
    DensityMatrix::from_raw((&a * &a.adjoint()).hermitian_part())
}

/// Channel-level form of [`max_image_fidelity`]. Inputs are optimized through
/// purifications on `input ⊗ reference`, so mixed maximizers are reachable.
pub fn max_image_fidelity_channels(ch0: &Channel, ch1: &Channel, cfg: &OptimizerConfig) -> Result<ImageFidelity> {
    cfg.validate()?;
    if (ch0.n_in(), ch0.n_out()) != (ch1.n_in(), ch1.n_out()) {
        return Err(Error::Shape(format!(
            "circuits of type ({},{}) and ({},{})",
            ch0.n_in(),
            ch0.n_out(),
            ch1.n_in(),
            ch1.n_out()
        )));
    }
    let iso = Isometries::new(ch0, ch1)?;
    let dim = iso.d_in * iso.d_in;
    let runs: Vec<Run> = (0..cfg.restarts)
        .into_par_iter()
        .map(|j| {
            let mut rng = cfg.rng(j);
            let a = random_state(&mut rng, dim).amplitudes().to_vec();
            let b = random_state(&mut rng, dim).amplitudes().to_vec();
            ascend(&iso, [a, b], cfg)
        })
        .collect();
    let best = best_index(runs.iter().map(|r| r.value));
    let run = runs.into_iter().nth(best).expect("restarts >= 1");
    let rho0 = marginal(&run.psi[0], iso.d_in);
    let rho1 = marginal(&run.psi[1], iso.d_in);
    let out0 = DensityMatrix::from_raw(ch0.apply(rho0.matrix())?.hermitian_part());
    let out1 = DensityMatrix::from_raw(ch1.apply(rho1.matrix())?.hermitian_part());
    Ok(ImageFidelity {
        value: fidelity(&out0, &out1)?,
        rho0,
        rho1,
        converged: run.converged,
        restarts_used: cfg.restarts,
        history: run.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, StdGate};
    use crate::random::random_kraus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 4,
            ..OptimizerConfig::with_seed(3)
        }
    }

    fn constant(prep: &str) -> Circuit {
        parse_circuit(&format!("circuit c inputs 1\ntrace 0\nancilla\n{prep}end")).unwrap()
    }

    #[test]
    fn identical_identities_overlap_fully() {
        let id = Circuit::identity("id", 1);
        let r = max_image_fidelity(&id, &id, &quick()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_channels() {
        let zero = constant("");
        let one = constant("gate X 0\n");
        let plus = constant("gate H 0\n");
        assert!(max_image_fidelity(&zero, &one, &quick()).unwrap().value < 1e-9);
        let r = max_image_fidelity(&zero, &plus, &quick()).unwrap();
        assert!((r.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn ascent_is_monotone_and_value_matches_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let ch0 = Channel::from_kraus(1, 1, &random_kraus(&mut rng, 2, 2, 2)).unwrap();
        let ch1 = Channel::from_kraus(1, 1, &[StdGate::H.matrix()]).unwrap();
        let r = max_image_fidelity_channels(&ch0, &ch1, &quick()).unwrap();
        assert!(r.history.windows(2).all(|p| p[1] >= p[0] - 1e-12));
        assert!((r.value - r.history.last().unwrap()).abs() < 1e-8);
        assert!((0.0..=1.0).contains(&r.value));
    }
}

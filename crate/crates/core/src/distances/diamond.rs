use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::helstrom;
use crate::error::{Error, Result};
use crate::numkernel::{check_dim, top_eigenvector, ComplexMatrix, StateVector};
use crate::random::random_state;
use crate::simulator::{contract_adjoint, contract_forward, Channel};

/// Restart and stopping policy shared by the local optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once an iteration improves the objective by at most
    /// `rel_tol · max(1, value)`.
    pub rel_tol: f64,
    /// Restart `j` draws its starting point from seed `seed + j`.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 500,
            rel_tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Domain("at least one restart is required".into()));
        }
        // Negated so that NaN is rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.rel_tol > 0.0) {
            return Err(Error::Domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        Ok(())
    }

    pub(crate) fn rng(&self, restart: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(restart as u64))
    }

    pub(crate) fn stalled(&self, prev: f64, value: f64) -> bool {
        (value - prev).abs() <= self.rel_tol * value.abs().max(1.0)
    }
}

/// The best input and measurement found for distinguishing two channels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiamondWitness {
    /// `‖(Φ0⊗I − Φ1⊗I)(ψψ†)‖_tr`, a lower bound on `‖Φ0 − Φ1‖⋄`.
    pub value: f64,
    pub converged: bool,
    pub restarts_used: usize,
    pub reference_dim: usize,
    /// Input on `input ⊗ reference`, input factor first.
    pub psi: StateVector,
    /// Helstrom projector on `output ⊗ reference`.
    pub measurement: ComplexMatrix,
    /// Objective after each measurement update of the winning restart.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// `Φ0 ⊗ I − Φ1 ⊗ I` and its adjoint, evaluated by contracting the difference
/// of the Choi matrices.
#[derive(Clone, Debug)]
pub struct DiffMap {
    d_in: usize,
    d_out: usize,
    d_ref: usize,
    diff: ComplexMatrix,
}

impl DiffMap {
    pub fn new(ch0: &Channel, ch1: &Channel, d_ref: usize) -> Result<DiffMap> {
        if (ch0.n_in(), ch0.n_out()) != (ch1.n_in(), ch1.n_out()) {
            return Err(Error::Shape(format!(
                "channels of type ({},{}) and ({},{})",
                ch0.n_in(),
                ch0.n_out(),
                ch1.n_in(),
                ch1.n_out()
            )));
        }
        if d_ref == 0 {
            return Err(Error::Domain("reference dimension must be positive".into()));
        }
        check_dim(ch0.d_in() * d_ref, "input with reference")?;
        check_dim(ch0.d_out() * d_ref, "output with reference")?;
        Ok(DiffMap {
            d_in: ch0.d_in(),
            d_out: ch0.d_out(),
            d_ref,
            diff: ch0.choi() - ch1.choi(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.d_in * self.d_ref
    }

    pub fn reference_dim(&self) -> usize {
        self.d_ref
    }

    /// `Δ(ψ) = (Φ0⊗I − Φ1⊗I)(ψψ†)`.
    pub fn forward(&self, psi: &[Complex64]) -> ComplexMatrix {
        let (d_in, d_out, d_ref) = (self.d_in, self.d_out, self.d_ref);
        assert_eq!(psi.len(), d_in * d_ref, "input vector length");
        // B[(o,r),(o',i')] = Σ_i D[(o,i),(o',i')] ψ[i,r]
        let bcols = d_out * d_in;
        let mut b = vec![Complex64::default(); d_out * d_ref * bcols];
        for o in 0..d_out {
            for i in 0..d_in {
                let drow = self.diff.row(o * d_in + i);
                for r in 0..d_ref {
                    let p = psi[i * d_ref + r];
                    if p == Complex64::default() {
                        continue;
                    }
                    let brow = &mut b[(o * d_ref + r) * bcols..(o * d_ref + r + 1) * bcols];
                    for (t, s) in brow.iter_mut().zip(drow) {
                        *t += s * p;
                    }
                }
            }
        }
        // Δ[(o,r),(o',r')] = Σ_{i'} B[(o,r),(o',i')] conj(ψ[i',r'])
        let n = d_out * d_ref;
        ComplexMatrix::from_fn(n, n, |row, col| {
            let (op, rp) = (col / d_ref, col % d_ref);
            let brow = &b[row * bcols + op * d_in..row * bcols + (op + 1) * d_in];
            brow.iter()
                .enumerate()
                .map(|(ip, &x)| x * psi[ip * d_ref + rp].conj())
                .sum()
        })
    }

    /// `(Φ0⊗I − Φ1⊗I)(x)` for an arbitrary operator on input ⊗ reference.
    pub fn forward_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        contract_forward(&self.diff, self.d_out, self.d_in, self.d_ref, x)
    }

    /// `(Φ0⊗I − Φ1⊗I)†(m)`, so that `tr(m Δ(ψ)) = ⟨ψ|adjoint(m)|ψ⟩`.
    pub fn adjoint(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        contract_adjoint(&self.diff, self.d_out, self.d_in, self.d_ref, m)
    }
}

/// One seesaw ascent from a given start.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub value: f64,
    pub psi: Vec<Complex64>,
    pub measurement: ComplexMatrix,
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Alternates the optimal measurement for the current input with the optimal
/// input for the current measurement. Each half-step can only raise
/// `2·tr(MΔ)`, so the recorded objective is nondecreasing.
pub fn seesaw(map: &DiffMap, start: &[Complex64], max_iters: usize, cfg: &OptimizerConfig) -> Result<SeesawRun> {
    let mut psi = start.to_vec();
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut measurement;
    loop {
        let delta = map.forward(&psi).hermitian_part();
        let h = helstrom(&delta)?;
        measurement = h.m;
        let value = h.value;
        if let Some(&prev) = history.last() {
            debug_assert!(
                value >= prev - 1e-9 * prev.max(1.0),
                "seesaw objective decreased from {prev} to {value}"
            );
            history.push(value);
            if cfg.stalled(prev, value) {
                converged = true;
                break;
            }
        } else {
            history.push(value);
        }
        if history.len() > max_iters {
            break;
        }
        let k = map.adjoint(&measurement)?.hermitian_part();
        psi = top_eigenvector(&k);
    }
    Ok(SeesawRun {
        value: *history.last().expect("at least one evaluation"),
        psi,
        measurement,
        history,
        converged,
    })
}

/// Diamond-norm lower bound with the reference as large as the input.
pub fn diamond_norm(ch0: &Channel, ch1: &Channel, cfg: &OptimizerConfig) -> Result<DiamondWitness> {
    diamond_norm_with_reference(ch0, ch1, ch0.d_in(), cfg)
}

/// Best seesaw value over `cfg.restarts` random pure starts on
/// `input ⊗ reference` with a reference of dimension `d_ref`.
pub fn diamond_norm_with_reference(
    ch0: &Channel,
    ch1: &Channel,
    d_ref: usize,
    cfg: &OptimizerConfig,
) -> Result<DiamondWitness> {
    cfg.validate()?;
    let map = DiffMap::new(ch0, ch1, d_ref)?;
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|j| {
            let start = random_state(&mut cfg.rng(j), map.input_dim());
            seesaw(&map, start.amplitudes(), cfg.max_iters, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = best_index(runs.iter().map(|r| r.value));
    let run = runs.into_iter().nth(best).expect("restarts >= 1");
    Ok(DiamondWitness {
        value: run.value.clamp(0.0, 2.0),
        converged: run.converged,
        restarts_used: cfg.restarts,
        reference_dim: d_ref,
        psi: StateVector::normalized(run.psi)?,
        measurement: run.measurement,
        history: run.history,
    })
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn best_index(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, v) in values.enumerate() {
        if v > best.1 {
            best = (j, v);
        }
    }
    best.0
}

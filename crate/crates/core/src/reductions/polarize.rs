use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{parity_mix, same_kind, tensor_power};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::numkernel::dim_cap;

/// Promise gap `(b, a)` to be widened to `(2^{-n}, 2 − 2^{-n})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationParams {
    pub n: u32,
    pub a: f64,
    pub b: f64,
}

/// Repetition counts of the three stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub r: u64,
    pub s: u64,
    pub t: u64,
}

impl PolarizationParams {
    pub fn new(n: u32, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("precision n must be at least 1".into()));
        }
        if !(0.0 < b && b < a && a < 2.0) {
            return Err(Error::Domain(format!("need 0 < b < a < 2, got a = {a}, b = {b}")));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(2.0 * b < a * a) {
            return Err(Error::Domain(format!("need 2b < a², got a = {a}, b = {b}")));
        }
        Ok(PolarizationParams { n, a, b })
    }

    /// `r = ⌈log(16n) / log(a²/2b)⌉`, `s = ⌊(b/2)^{-r} / 4⌋`, `t = ⌈(n+1)/2⌉`.
    ///
    /// `s` saturates at `u64::MAX`; it is astronomically large for most
    /// parameters.
    pub fn counts(&self) -> StageCounts {
        let ratio = (16.0 * self.n as f64).log2() / (self.a * self.a / (2.0 * self.b)).log2();
        // Guard against a ratio such as 4.000000000000001 rounding up.
        let r = (ratio - 1e-12).ceil().max(1.0) as u64;
        let s = ((self.b / 2.0).powf(-(r as f64)) / 4.0).floor().max(1.0) as u64;
        let t = (self.n as u64 + 1).div_ceil(2);
        StageCounts { r, s, t }
    }
}

/// Closed interval `[lo, hi]` for a diamond distance.
pub type Interval = [f64; 2];

/// Bounds guaranteed after one amplification stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageCertificate {
    pub stage: usize,
    pub construction: String,
    pub params: BTreeMap<String, u64>,
    /// Range of `‖S0 − S1‖⋄` when the input pair is far apart.
    pub guaranteed_interval_yes: Interval,
    /// Range of `‖S0 − S1‖⋄` when the input pair is close.
    pub guaranteed_interval_no: Interval,
}

/// Stage-by-stage bounds for an amplification pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Promise the input pair satisfies: far means `‖Q0 − Q1‖⋄ ≥ a`, close
    /// means `≤ b`.
    pub input_interval_yes: Interval,
    pub input_interval_no: Interval,
    pub stages: Vec<StageCertificate>,
}

/// `ε ↦ 2(ε/2)^r`, the exact law of the parity mixture.
fn parity_law(eps: f64, r: u64) -> f64 {
    2.0 * (eps / 2.0).powf(r as f64)
}

impl Certificate {
    pub fn new(a: f64, b: f64) -> Certificate {
        Certificate {
            input_interval_yes: [a, 2.0],
            input_interval_no: [0.0, b],
            stages: Vec::new(),
        }
    }

    fn current(&self) -> (Interval, Interval) {
        self.stages.last().map_or((self.input_interval_yes, self.input_interval_no), |s| {
            (s.guaranteed_interval_yes, s.guaranteed_interval_no)
        })
    }

    fn push(&mut self, construction: &str, key: &str, value: u64, yes: Interval, no: Interval) {
        self.stages.push(StageCertificate {
            stage: self.stages.len() + 1,
            construction: construction.into(),
            params: BTreeMap::from([(key.to_string(), value)]),
            guaranteed_interval_yes: yes,
            guaranteed_interval_no: no,
        });
    }

    /// Appends a parity-mixture stage with `r` blocks.
    pub fn parity(mut self, r: u64) -> Certificate {
        let (yes, no) = self.current();
        let map = |i: Interval| [parity_law(i[0], r), parity_law(i[1], r)];
        self.push("parity_mix", "r", r, map(yes), map(no));
        self
    }

    /// Appends a tensor-power stage with `k` copies.
    pub fn tensor(mut self, k: u64) -> Certificate {
        let (yes, no) = self.current();
        let kf = k as f64;
        let map = |i: Interval| {
            [
                2.0 - 2.0 * (-kf * i[0] * i[0] / 8.0).exp(),
                (kf * i[1]).min(2.0),
            ]
        };
        self.push("tensor_power", "k", k, map(yes), map(no));
        self
    }

    /// Certificate of the full parity → tensor → parity pipeline.
    pub fn polarization(params: &PolarizationParams, counts: StageCounts) -> Certificate {
        Certificate::new(params.a, params.b)
            .parity(counts.r)
            .tensor(counts.s)
            .parity(counts.t)
    }
}

/// Output of [`polarize`].
#[derive(Clone, Debug)]
pub struct Polarized {
    pub s0: Circuit,
    pub s1: Circuit,
    pub counts: StageCounts,
    pub certificate: Certificate,
}

/// Parity mixture with `r` blocks, tensor power with `s` copies, parity
/// mixture with `t` blocks. `counts` overrides the values derived from
/// `params`; the derived values are never silently reduced, so an
/// oversized request fails with a size error instead.
pub fn polarize(
    q0: &Circuit,
    q1: &Circuit,
    params: &PolarizationParams,
    counts: Option<StageCounts>,
) -> Result<Polarized> {
    let (n, m) = same_kind(q0, q1)?;
    let counts = counts.unwrap_or_else(|| params.counts());
    if counts.r == 0 || counts.s == 0 || counts.t == 0 {
        return Err(Error::Domain("stage counts must be at least 1".into()));
    }
    let certificate = Certificate::polarization(params, counts);
    let qubits = (n + m) as u128 * counts.r as u128 * counts.s as u128 * counts.t as u128;
    let cap_qubits = dim_cap().ilog2() as u128;
    if qubits > cap_qubits {
        return Err(Error::size(
            format!("polarized channel with r={}, s={}, t={}", counts.r, counts.s, counts.t),
            format!("2^{qubits}"),
            dim_cap(),
        ));
    }
    let (a0, a1) = parity_mix(q0, q1, counts.r as usize)?;
    let (b0, b1) = tensor_power(&a0, &a1, counts.s as usize)?;
    let (s0, s1) = parity_mix(&b0, &b1, counts.t as usize)?;
    Ok(Polarized {
        s0,
        s1,
        counts,
        certificate,
    })
}

use super::{controlled_join, same_kind};
use crate::circuit::{Circuit, CircuitBuilder, StdGate, WireId};
use crate::error::{Error, Result};
use crate::numkernel::check_qubits;
use crate::simulator::dilate;

/// `k` copies of each circuit side by side.
pub fn tensor_power(q0: &Circuit, q1: &Circuit, k: usize) -> Result<(Circuit, Circuit)> {
    let (n, m) = same_kind(q0, q1)?;
    if k == 0 {
        return Err(Error::Domain("tensor power needs k >= 1".into()));
    }
    check_qubits(k.saturating_mul(n + m), &format!("{k}-fold tensor power"))?;
    Ok((power(q0, k)?, power(q1, k)?))
}

fn power(q: &Circuit, k: usize) -> Result<Circuit> {
    if k == 1 {
        return Ok(q.clone());
    }
    let (mut b, ins) = CircuitBuilder::new(format!("{}_pow{k}", q.name), k * q.n_in);
    let n = q.n_in;
    let mut outs = Vec::new();
    for j in 0..k {
        outs.extend(b.embed(q, &ins[j * n..(j + 1) * n])?);
    }
    b.finish(&outs)
}

/// Uniform mixtures of `q_{x1} ⊗ … ⊗ q_{xr}` over even-parity strings `x`
/// (first circuit) and odd-parity strings (second circuit).
pub fn parity_mix(q0: &Circuit, q1: &Circuit, r: usize) -> Result<(Circuit, Circuit)> {
    same_kind(q0, q1)?;
    if r == 0 {
        return Err(Error::Domain("parity mix needs r >= 1".into()));
    }
    let pairs = vec![(q0.clone(), q1.clone()); r];
    Ok((parity_mix_pairs(&pairs, false)?, parity_mix_pairs(&pairs, true)?))
}

/// Uniform mixture of `pairs[0].x1 ⊗ … ⊗ pairs[r-1].xr` over all selector
/// strings `x` with the requested parity.
///
/// The first `r − 1` selectors are fair coins (ancilla, Hadamard, decohere);
/// the last is their parity, flipped once more for odd mixtures. Each block
/// is the controlled join of the pair's dilations, controlled by its coin.
pub fn parity_mix_pairs(pairs: &[(Circuit, Circuit)], odd: bool) -> Result<Circuit> {
    let r = pairs.len();
    if r == 0 {
        return Err(Error::Domain("parity mix needs at least one pair".into()));
    }
    let mut qubits = 0usize;
    for (a, b) in pairs {
        let (n, m) = same_kind(a, b)?;
        qubits = qubits.saturating_add(n + m);
    }
    check_qubits(qubits, "parity mixture")?;
    if r == 1 {
        return Ok(if odd { pairs[0].1.clone() } else { pairs[0].0.clone() });
    }

    let joins = pairs
        .iter()
        .map(|(a, b)| controlled_join(&dilate(a)?, &dilate(b)?)?.to_circuit())
        .collect::<Result<Vec<_>>>()?;
    let n_total: usize = pairs.iter().map(|(a, _)| a.n_in).sum();
    let parity = if odd { "odd" } else { "even" };
    let (mut b, ins) = CircuitBuilder::new(format!("{}_{}_parity{r}_{parity}", pairs[0].0.name, pairs[0].1.name), n_total);

    let p = b.ancilla();
    if odd {
        b.std(StdGate::X, &[p]);
    }
    let mut outputs = Vec::new();
    let mut offset = 0;
    for (i, join) in joins.iter().enumerate() {
        let n_i = pairs[i].0.n_in;
        let control = if i + 1 < r {
            let c = b.ancilla();
            b.std(StdGate::H, &[c]);
            b.decohere(c);
            b.std(StdGate::Cnot, &[c, p]);
            c
        } else {
            p
        };
        let inputs: Vec<WireId> = std::iter::once(control)
            .chain(ins[offset..offset + n_i].iter().copied())
            .collect();
        offset += n_i;
        let outs = b.embed(join, &inputs)?;
        b.trace(outs[0]);
        outputs.extend_from_slice(&outs[1..]);
    }
    b.finish(&outputs)
}

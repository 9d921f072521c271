//! Line-based circuit text format.
//!
//! ```text
//! # comments run to end of line
//! circuit <name> inputs <n>
//! gate <H|X|Z|T|CNOT|CZ> <wire>...
//! unitary <arity> <wire>... <re,im> x 4^arity   (row-major)
//! ancilla
//! trace <wire>
//! decohere <wire>
//! end
//! ```

use std::fmt::Write;

use num_complex::Complex64;

use super::{Circuit, Gate, GateKind, StdGate, MAX_ARITY};
use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

fn parse_complex(tok: &str, line: usize) -> Result<Complex64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| syntax(line, format!("expected `re,im`, found `{tok}`")))?;
    let re: f64 = re
        .parse()
        .map_err(|_| syntax(line, format!("bad real part `{re}`")))?;
    let im: f64 = im
        .parse()
        .map_err(|_| syntax(line, format!("bad imaginary part `{im}`")))?;
    Ok(Complex64::new(re, im))
}

/// Parses and validates a circuit. Structural problems are reported with the
/// source line of the offending gate.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "empty circuit text"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let (name, n_in) = match head.as_slice() {
        ["circuit", name, "inputs", n] => (
            name.to_string(),
            n.parse::<usize>()
                .map_err(|_| syntax(hline, format!("bad input count `{n}`")))?,
        ),
        _ => return Err(syntax(hline, "expected `circuit <name> inputs <n>`")),
    };

    let mut circuit = Circuit::new(name, n_in);
    let mut gate_lines = Vec::new();
    let mut ended = false;
    for (ln, line) in lines {
        if ended {
            return Err(syntax(ln, "content after `end`"));
        }
        let mut toks = line.split_whitespace();
        let op = toks.next().expect("non-empty line");
        let gate = match op {
            "end" => {
                ended = true;
                if toks.next().is_some() {
                    return Err(syntax(ln, "unexpected tokens after `end`"));
                }
                continue;
            }
            "gate" => {
                let name = toks.next().ok_or_else(|| syntax(ln, "missing gate name"))?;
                let g = StdGate::from_name(name)
                    .ok_or_else(|| syntax(ln, format!("unknown gate `{name}`")))?;
                let wires = toks
                    .map(|t| parse_usize(Some(t), ln, "wire index"))
                    .collect::<Result<Vec<_>>>()?;
                if wires.len() != g.arity() {
                    return Err(syntax(
                        ln,
                        format!("{} takes {} wires, got {}", g.name(), g.arity(), wires.len()),
                    ));
                }
                Gate::std(g, wires)
            }
            "unitary" => {
                let arity = parse_usize(toks.next(), ln, "arity")?;
                if arity == 0 || arity > MAX_ARITY {
                    return Err(syntax(
                        ln,
                        format!("unitary arity {arity} outside 1..={MAX_ARITY}"),
                    ));
                }
                let wires = (0..arity)
                    .map(|_| parse_usize(toks.next(), ln, "wire index"))
                    .collect::<Result<Vec<_>>>()?;
                let entries = toks
                    .map(|t| parse_complex(t, ln))
                    .collect::<Result<Vec<_>>>()?;
                let dim = 1usize << arity;
                if entries.len() != dim * dim {
                    return Err(syntax(
                        ln,
                        format!("expected {} matrix entries, got {}", dim * dim, entries.len()),
                    ));
                }
                let matrix = ComplexMatrix::new(dim, dim, entries)
                    .map_err(|e| syntax(ln, e.to_string()))?;
                Gate::unitary(matrix, wires)
            }
            "ancilla" => Gate::ancilla(),
            "trace" | "decohere" => {
                let w = parse_usize(toks.next(), ln, "wire index")?;
                if op == "trace" {
                    Gate::trace(w)
                } else {
                    Gate::decohere(w)
                }
            }
            other => return Err(syntax(ln, format!("unknown instruction `{other}`"))),
        };
        if matches!(op, "ancilla" | "trace" | "decohere") && toks_left(line, &gate) {
            return Err(syntax(ln, "unexpected trailing tokens"));
        }
        gate_lines.push(ln);
        circuit.gates.push(gate);
    }
    if !ended {
        return Err(syntax(text.lines().count().max(1), "missing `end`"));
    }
    if let Some(mut v) = circuit.validate().into_iter().next() {
        v.line = gate_lines.get(v.gate).copied();
        return Err(Error::Invalid(v));
    }
    Ok(circuit)
}

fn toks_left(line: &str, gate: &Gate) -> bool {
    let expected = 1 + gate.wires.len();
    line.split_whitespace().count() > expected
}

fn fmt_f64(x: f64) -> String {
    // 17 significant digits always round-trip a double.
    format!("{x:.16e}")
}

/// Renders a circuit in the text format. Named gates keep their names; other
/// unitaries are printed with every entry at 17 significant digits.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "circuit {} inputs {}", c.name, c.n_in).unwrap();
    for g in &c.gates {
        let wires = g
            .wires
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        match &g.kind {
            GateKind::Unitary {
                label: Some(std), ..
            } => writeln!(out, "gate {} {wires}", std.name()).unwrap(),
            GateKind::Unitary { matrix, label: None } => {
                write!(out, "unitary {} {wires}", g.arity()).unwrap();
                for z in matrix.data() {
                    write!(out, " {},{}", fmt_f64(z.re), fmt_f64(z.im)).unwrap();
                }
                out.push('\n');
            }
            GateKind::Ancilla => out.push_str("ancilla\n"),
            GateKind::Trace => writeln!(out, "trace {wires}").unwrap(),
            GateKind::Decohere => writeln!(out, "decohere {wires}").unwrap(),
        }
    }
    out.push_str("end\n");
    out
}

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use qcd_core::circuit::ViolationKind;
use qcd_core::distances::{diamond_norm, fidelity, max_image_fidelity, trace_distance};
use qcd_core::protocol::{run_optimal_protocol, run_protocol, ProverStrategy};
use qcd_core::reductions::{ci_to_qcd, parity_mix, polarize, tensor_power, Certificate, PolarizationParams, StageCounts};
use qcd_core::{
    apply, choi_of, parse_circuit, serialize_circuit, Channel, Circuit, ComplexMatrix, DensityMatrix, Error, InstanceKind,
    ProblemInstance,
};

use crate::exit::{code_of, Failure, Report, INVALID, NOT_CONVERGED, OK, SIZE_CAP};
use crate::{Command, DistanceKind, GlobalOpts, ReduceKind};

type Outcome = Result<Report, Failure>;

pub fn run(command: &Command, opts: &GlobalOpts) -> Outcome {
    opts.optimizer().validate()?;
    match command {
        Command::Validate { circuit } => validate(circuit),
        Command::Simulate { circuit, state } => simulate(circuit, state),
        Command::Choi { circuit } => choi(circuit),
        Command::Distance { kind, inputs } => distance(*kind, inputs, opts),
        Command::Reduce {
            kind,
            instance,
            k,
            precision,
            counts,
            out,
        } => reduce(*kind, instance, *k, *precision, *counts, out),
        Command::Protocol {
            instance,
            trials,
            strategy,
        } => protocol(instance, *trials, strategy.as_deref(), opts),
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn report<T: Serialize + ?Sized>(value: &T, code: u8) -> Outcome {
    Ok(Report {
        json: to_json(value),
        code,
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |err| Failure {
        code: code_of(&err),
        message: format!("{}: {err}", path.display()),
        json: None,
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    parse_circuit(&read(path)?).map_err(with_path(path))
}

fn load_state(path: &Path) -> Result<DensityMatrix, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| with_path(path)(e.into()))
}

fn load_instance(path: &Path) -> Result<ProblemInstance, Failure> {
    ProblemInstance::from_json(&read(path)?).map_err(with_path(path))
}

/// Two circuits from two circuit files or from one instance file.
fn load_pair(inputs: &[PathBuf]) -> Result<(Circuit, Circuit), Failure> {
    match inputs {
        [instance] => {
            let inst = load_instance(instance)?;
            Ok((inst.q0, inst.q1))
        }
        [a, b] => Ok((load_circuit(a)?, load_circuit(b)?)),
        _ => Err(Failure::usage("expected one instance file or two circuit files")),
    }
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    stage: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_preservation_defect: Option<f64>,
    errors: Vec<String>,
}

fn validate(path: &Path) -> Outcome {
    let invalid = |stage, name, kind, err: String| {
        eprintln!("{}: {err}", path.display());
        report(
            &ValidateReport {
                valid: false,
                stage,
                name,
                kind,
                trace_preservation_defect: None,
                errors: vec![err],
            },
            INVALID,
        )
    };
    let circuit = match parse_circuit(&read(path)?) {
        Ok(c) => c,
        Err(err) if code_of(&err) == INVALID => {
            let stage = match &err {
                Error::Syntax { .. } => "parse",
                Error::Invalid(v) if matches!(v.kind, ViolationKind::NotUnitary { .. }) => "admissibility",
                _ => "structure",
            };
            return invalid(stage, None, None, err.to_string());
        }
        Err(err) => return Err(with_path(path)(err)),
    };
    let (n, m) = circuit.kind();
    let name = Some(circuit.name.clone());
    let sim = choi_of(&circuit)?;
    match Channel::from_choi(n, m, sim.choi().clone()) {
        Ok(ch) => report(
            &ValidateReport {
                valid: true,
                stage: "admissibility",
                name,
                kind: Some((n, m)),
                trace_preservation_defect: Some(ch.trace_preservation_defect()),
                errors: Vec::new(),
            },
            OK,
        ),
        Err(err) => invalid("admissibility", name, Some((n, m)), err.to_string()),
    }
}

fn simulate(circuit: &Path, state: &Path) -> Outcome {
    let c = load_circuit(circuit)?;
    let rho = load_state(state)?;
    report(&apply(&c, &rho)?, OK)
}

#[derive(Serialize)]
struct ChoiReport<'a> {
    n_in: usize,
    n_out: usize,
    qubits: usize,
    #[serde(flatten)]
    choi: &'a ComplexMatrix,
}

fn choi(circuit: &Path) -> Outcome {
    let ch = choi_of(&load_circuit(circuit)?)?;
    report(
        &ChoiReport {
            n_in: ch.n_in(),
            n_out: ch.n_out(),
            qubits: ch.n_in() + ch.n_out(),
            choi: ch.choi(),
        },
        OK,
    )
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    kind: &'a str,
    #[serde(flatten)]
    result: T,
}

#[derive(Serialize)]
struct Value {
    value: f64,
}

fn distance(kind: DistanceKind, inputs: &[PathBuf], opts: &GlobalOpts) -> Outcome {
    let cfg = opts.optimizer();
    match kind {
        DistanceKind::Trace | DistanceKind::Fidelity => {
            let [a, b] = inputs else {
                return Err(Failure::usage("state distances need two state files"));
            };
            let (rho, xi) = (load_state(a)?, load_state(b)?);
            let (tag, value) = if kind == DistanceKind::Trace {
                ("trace", trace_distance(&rho, &xi)?)
            } else {
                ("fidelity", fidelity(&rho, &xi)?)
            };
            report(&Tagged { kind: tag, result: Value { value } }, OK)
        }
        DistanceKind::Dnorm => {
            let (q0, q1) = load_pair(inputs)?;
            same_type(&q0, &q1)?;
            let w = diamond_norm(&choi_of(&q0)?, &choi_of(&q1)?, &cfg)?;
            let code = converged_code(w.converged);
            report(&Tagged { kind: "dnorm", result: w }, code)
        }
        DistanceKind::Maxfid => {
            let (q0, q1) = load_pair(inputs)?;
            same_type(&q0, &q1)?;
            let f = max_image_fidelity(&q0, &q1, &cfg)?;
            let code = converged_code(f.converged);
            report(&Tagged { kind: "maxfid", result: f }, code)
        }
    }
}

fn same_type(q0: &Circuit, q1: &Circuit) -> Result<(), Failure> {
    if q0.kind() != q1.kind() {
        return Err(Failure::usage(format!(
            "circuits have different types {:?} and {:?}",
            q0.kind(),
            q1.kind()
        )));
    }
    Ok(())
}

fn converged_code(converged: bool) -> u8 {
    if converged {
        OK
    } else {
        eprintln!("warning: optimizer stopped at the iteration limit before converging");
        NOT_CONVERGED
    }
}

#[derive(Serialize)]
struct ReduceReport<'a> {
    construction: &'a str,
    files: Vec<String>,
    kind: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<StageCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
}

#[derive(Serialize)]
struct Refusal<'a> {
    error: String,
    params: &'a PolarizationParams,
    counts: StageCounts,
    certificate: Certificate,
}

/// Writes a circuit and checks that the file parses back to the same,
/// valid circuit.
fn emit(dir: &Path, file: &str, c: &Circuit) -> Result<String, Failure> {
    let path = dir.join(file);
    let text = serialize_circuit(c);
    write(&path, &text)?;
    let back = parse_circuit(&read(&path)?).map_err(with_path(&path))?;
    if &back != c {
        return Err(Error::Internal(format!("{} does not parse back to the emitted circuit", path.display())).into());
    }
    eprintln!("wrote {}", path.display());
    Ok(path.display().to_string())
}

fn reduce(
    kind: ReduceKind,
    instance: &Path,
    k: usize,
    precision: u32,
    counts: Option<StageCounts>,
    out: &Path,
) -> Outcome {
    let inst = load_instance(instance)?;
    fs::create_dir_all(out).map_err(|e| Failure::usage(format!("{}: {e}", out.display())))?;
    let (q0, q1) = (&inst.q0, &inst.q1);
    let (construction, pair) = match kind {
        ReduceKind::CiToQcd => ("ci_to_qcd", ci_to_qcd(q0, q1)?),
        ReduceKind::Tensor => ("tensor_power", tensor_power(q0, q1, k)?),
        ReduceKind::Parity => ("parity_mix", parity_mix(q0, q1, k)?),
        ReduceKind::Polarize => return reduce_polarize(&inst, precision, counts, out),
    };
    let mut files = vec![emit(out, "r0.qc", &pair.0)?, emit(out, "r1.qc", &pair.1)?];
    if kind == ReduceKind::CiToQcd {
        // The reduced pair is far apart exactly when some images are close,
        // so the thresholds carry over unchanged.
        let reduced = ProblemInstance::new(pair.0.clone(), pair.1.clone(), InstanceKind::Qcd, inst.a, inst.b)?;
        let path = out.join("instance.json");
        write(&path, &reduced.to_json())?;
        files.push(path.display().to_string());
    }
    report(
        &ReduceReport {
            construction,
            files,
            kind: pair.0.kind(),
            counts: None,
            certificate: None,
        },
        OK,
    )
}

fn reduce_polarize(inst: &ProblemInstance, precision: u32, counts: Option<StageCounts>, out: &Path) -> Outcome {
    let params = PolarizationParams::new(precision, inst.a, inst.b)?;
    let used = counts.unwrap_or_else(|| params.counts());
    match polarize(&inst.q0, &inst.q1, &params, counts) {
        Ok(p) => {
            let files = vec![
                emit(out, "s0.qc", &p.s0)?,
                emit(out, "s1.qc", &p.s1)?,
                {
                    let path = out.join("certificate.json");
                    write(&path, &to_json(&p.certificate))?;
                    path.display().to_string()
                },
            ];
            report(
                &ReduceReport {
                    construction: "polarize",
                    files,
                    kind: p.s0.kind(),
                    counts: Some(p.counts),
                    certificate: Some(p.certificate),
                },
                OK,
            )
        }
        Err(err @ Error::SizeCap { .. }) => Err(Failure {
            code: SIZE_CAP,
            message: format!("{err}; pass --override r,s,t for a smaller pipeline"),
            json: Some(to_json(&Refusal {
                error: err.to_string(),
                params: &params,
                counts: used,
                certificate: Certificate::polarization(&params, used),
            })),
        }),
        Err(err) => Err(err.into()),
    }
}

fn protocol(instance: &Path, trials: u64, strategy: Option<&Path>, opts: &GlobalOpts) -> Outcome {
    let inst = load_instance(instance)?;
    if inst.kind != InstanceKind::Qcd {
        return Err(Failure::usage("the protocol runs on distinguishability (QCD) instances"));
    }
    match strategy {
        Some(path) => {
            let strat: ProverStrategy = serde_json::from_str(&read(path)?).map_err(|e| with_path(path)(e.into()))?;
            report(&run_protocol(&inst.q0, &inst.q1, &strat, trials, opts.seed)?, OK)
        }
        None => {
            let (result, witness) = run_optimal_protocol(&inst.q0, &inst.q1, &opts.optimizer(), trials, opts.seed)?;
            report(&result, converged_code(witness.converged))
        }
    }
}

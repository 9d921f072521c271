//! `qcd`: validate circuits, compute distances, compile reductions and run the
//! distinguishability protocol. Results go to standard output as JSON; logs
//! and error messages go to standard error.

mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcd_core::distances::OptimizerConfig;
use qcd_core::numkernel::{set_dim_cap, DEFAULT_DIM_CAP};
use qcd_core::reductions::StageCounts;

#[derive(Parser, Debug)]
#[command(name = "qcd", version, about = "Quantum circuit distinguishability toolkit")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every command.
#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for optimizer restarts and protocol sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random restarts per optimization.
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    /// Relative improvement below which an optimizer run stops.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iteration limit per optimizer restart.
    #[arg(long, global = true, default_value_t = 500)]
    pub max_iters: usize,
    /// Largest matrix side any computation may allocate.
    #[arg(long, global = true, default_value_t = DEFAULT_DIM_CAP)]
    pub cap: usize,
}

impl GlobalOpts {
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            rel_tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a circuit file, including its Choi admissibility.
    Validate { circuit: PathBuf },
    /// Apply a circuit to a density-matrix file.
    Simulate { circuit: PathBuf, state: PathBuf },
    /// Print the Choi matrix of a circuit.
    Choi { circuit: PathBuf },
    /// Distance between two states or two circuits.
    Distance {
        #[arg(value_enum)]
        kind: DistanceKind,
        /// Two state files (trace, fidelity), or two circuit files or one
        /// instance file (dnorm, maxfid).
        #[arg(num_args = 1..=2, required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Compile a reduction or amplifier of an instance into circuit files.
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        instance: PathBuf,
        /// Copies (tensor) or blocks (parity).
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Target precision of the polarizer.
        #[arg(long, default_value_t = 1)]
        precision: u32,
        /// Replace the polarizer's stage counts, as `r,s,t`.
        #[arg(long = "override", value_parser = parse_counts)]
        counts: Option<StageCounts>,
        /// Directory for the emitted files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the distinguishability protocol on an instance.
    Protocol {
        instance: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Prover strategy JSON; the optimal prover is used when absent.
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    Trace,
    Fidelity,
    Dnorm,
    Maxfid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceKind {
    #[value(name = "ci2qcd")]
    CiToQcd,
    Tensor,
    Parity,
    Polarize,
}

fn parse_counts(text: &str) -> Result<StageCounts, String> {
    let parts: Vec<u64> = text
        .split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [r, s, t] => Ok(StageCounts { r, s, t }),
        _ => Err(format!("expected r,s,t, got `{text}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    set_dim_cap(cli.opts.cap);
    match commands::run(&cli.command, &cli.opts) {
        Ok(report) => {
            println!("{}", report.json);
            ExitCode::from(report.code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            if let Some(json) = failure.json {
                println!("{json}");
            }
            ExitCode::from(failure.code)
        }
    }
}

use std::path::PathBuf;

use anyhow::anyhow;
use clap::ValueEnum;
use qhall::compiler::{
    calibrate_iswap, idle_identity, synthesize, Budget, TargetUnitary, Template,
    CONVERGENCE_INFIDELITY,
};
use qhall::control::program_unitary;
use qhall::model::coupling_table;
use qhall::{ChainSpec, Program, SynthesisResult};
use serde::Serialize;

use crate::io::{classify, emit, input, load_chain, to_json, CmdResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Iswap,
    Cnot,
    Swap,
    Idle,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Chain file (JSON).
    pub chain: PathBuf,
    #[arg(long, value_enum)]
    pub target: Target,
    /// The two spins of a two-qubit target.
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    pub qubits: Option<Vec<usize>>,
    /// Objective evaluations for numerical synthesis.
    #[arg(long, default_value_t = Budget::default().max_evaluations)]
    pub budget: usize,
    #[arg(long, default_value_t = Budget::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Idle duration in seconds; defaults to 1/J of the strongest pair.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Program file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Fidelity report file; stderr when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report<'a> {
    target: Target,
    qubits: &'a [usize],
    method: &'static str,
    fidelity: f64,
    converged: bool,
    iterations: usize,
    optimizer_fidelity: f64,
    total_delay_s: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

fn pair(args: &Args) -> CmdResult<(usize, usize)> {
    match args.qubits.as_deref() {
        Some(&[i, j]) => Ok((i, j)),
        _ => Err(input(anyhow!("--qubits I J is required for this target"))),
    }
}

fn numerical(
    spec: &ChainSpec,
    target: &qhall::TargetUnitary,
    args: &Args,
) -> CmdResult<SynthesisResult> {
    let template = Template::for_target(spec, target).map_err(classify)?;
    let budget = Budget {
        max_evaluations: args.budget,
        restarts: args.restarts,
        seed: args.seed,
    };
    synthesize(spec, target, &template, &budget).map_err(classify)
}

fn idle(spec: &ChainSpec, args: &Args) -> CmdResult<(SynthesisResult, Vec<String>)> {
    let tau = match args.tau {
        Some(t) => t,
        None => {
            let table = coupling_table(spec).map_err(classify)?;
            let strongest = table.first().map(|c| c.strength).unwrap_or(0.0);
            if strongest <= 0.0 {
                return Err(input(anyhow!("no coupled pairs; pass --tau")));
            }
            1.0 / strongest
        }
    };
    let idle = idle_identity(spec, tau).map_err(classify)?;
    let u = program_unitary(&idle.program, spec).map_err(classify)?;
    let f = u.trace().norm() / u.nrows() as f64;
    let result = SynthesisResult {
        program: idle.program,
        fidelity: f,
        iterations: 1,
        converged: 1.0 - f < CONVERGENCE_INFIDELITY,
        optimizer_fidelity: f,
    };
    Ok((result, idle.warnings))
}

pub fn run(args: &Args) -> CmdResult {
    let spec = load_chain(&args.chain)?;
    let (method, result, warnings, qubits) = match args.target {
        Target::Iswap => {
            let (i, j) = pair(args)?;
            let closed = calibrate_iswap(&spec, (i, j)).map_err(classify)?;
            if closed.converged {
                ("closed_form", closed, vec![], vec![i, j])
            } else {
                let target = TargetUnitary::<f64>::iswap(i, j).map_err(classify)?;
                let r = numerical(&spec, &target, args)?;
                let note = format!(
                    "closed-form iSWAP reached only F = {}; used numerical synthesis",
                    closed.fidelity
                );
                ("synthesis", r, vec![note], vec![i, j])
            }
        }
        Target::Cnot | Target::Swap => {
            let (i, j) = pair(args)?;
            let target = if args.target == Target::Cnot {
                TargetUnitary::<f64>::cnot(i, j)
            } else {
                TargetUnitary::<f64>::swap(i, j)
            }
            .map_err(classify)?;
            (
                "synthesis",
                numerical(&spec, &target, args)?,
                vec![],
                vec![i, j],
            )
        }
        Target::Idle => {
            let (r, w) = idle(&spec, args)?;
            ("refocusing", r, w, (0..spec.n()).collect())
        }
    };
    let program: &Program = &result.program;
    let report = Report {
        target: args.target,
        qubits: &qubits,
        method,
        fidelity: result.fidelity,
        converged: result.converged,
        iterations: result.iterations,
        optimizer_fidelity: result.optimizer_fidelity,
        total_delay_s: program.total_delay(),
        warnings,
    };
    emit(args.output.as_ref(), &format!("{}\n", program.to_json()))?;
    let report_text = to_json(&report)?;
    match &args.report {
        Some(_) => emit(args.report.as_ref(), &report_text)?,
        None => eprint!("{report_text}"),
    }
    if result.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::anyhow;
use qhall::ensemble::{majority_readout, run_ensemble_with_noise, Observable};
use qhall::{DisorderParams, EnsembleReport, NoiseParams};
use serde::Serialize;

use crate::io::{
    classify, emit, input, load_chain, load_program, to_json, CmdResult, ObservableArg,
};
use crate::simulate::{ToolInfo, TOOL};
use crate::RunInputs;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub inputs: RunInputs,
    /// `z:<qubits>`: σ_z product expectation of the final state.
    #[arg(long, default_value = "z:0", conflicts_with = "majority")]
    pub observable: ObservableArg,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    /// Position jitter sigma, nm.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 0.0)]
    pub coupling_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub readout_error: f64,
    /// T1 relaxation time, seconds.
    #[arg(long)]
    pub t1: Option<f64>,
    /// Majority-vote single-shot readout of this spin instead of expectations.
    #[arg(long)]
    pub majority: Option<usize>,
    /// Report file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Settings<'a> {
    chain_file: &'a str,
    program_file: &'a str,
    seed: u64,
    replicas: usize,
    mode: &'static str,
    observable: String,
    disorder: DisorderParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    t1_seconds: Option<f64>,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    tool: ToolInfo,
    timestamp: u64,
    settings: Settings<'a>,
    report: EnsembleReport,
}

pub fn run(args: &Args) -> CmdResult {
    let spec = load_chain(&args.inputs.chain)?;
    let program = load_program(&args.inputs.program, &spec)?;
    let disorder = DisorderParams {
        position_jitter_sigma: args.jitter,
        coupling_scale_sigma: args.coupling_sigma,
        readout_error: args.readout_error,
    };
    disorder.validate().map_err(classify)?;
    let noise = args.t1.map_or_else(NoiseParams::disabled, NoiseParams::t1);
    noise.validate().map_err(classify)?;
    if args.replicas == 0 {
        return Err(input(anyhow!("--replicas must be at least 1")));
    }

    let (mode, observable, report) = match args.majority {
        Some(target) => {
            if args.jitter != 0.0 || args.coupling_sigma != 0.0 || args.t1.is_some() {
                return Err(input(anyhow!(
                    "--majority replicas are identical copies; drop --jitter, --coupling-sigma and --t1"
                )));
            }
            let r = majority_readout(
                &program,
                &spec,
                target,
                args.replicas,
                args.readout_error,
                args.inputs.seed,
            )
            .map_err(classify)?;
            ("majority", format!("shot:{target}"), r)
        }
        None => {
            let ObservableArg::Z(qubits) = &args.observable else {
                return Err(input(anyhow!(
                    "ensemble observables are z:<qubits>; coupling is a sweep diagnostic"
                )));
            };
            let r = run_ensemble_with_noise(
                &program,
                &spec,
                &disorder,
                &Observable::z_product(qubits.clone()),
                args.replicas,
                args.inputs.seed,
                &noise,
            )
            .map_err(classify)?;
            ("expectation", args.observable.to_string(), r)
        }
    };

    let chain_file = args.inputs.chain.to_string_lossy();
    let program_file = args.inputs.program.to_string_lossy();
    let file = ReportFile {
        tool: TOOL,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        settings: Settings {
            chain_file: &chain_file,
            program_file: &program_file,
            seed: args.inputs.seed,
            replicas: args.replicas,
            mode,
            observable,
            disorder,
            t1_seconds: args.t1,
        },
        report,
    };
    emit(args.output.as_ref(), &to_json(&file)?)
}

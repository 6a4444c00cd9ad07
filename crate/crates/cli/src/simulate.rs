use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use qhall::control::{Interpreter, RunOptions};
use qhall::engine::MeasurementKind;
use qhall::ensemble::NoiseParams;
use serde::Serialize;

use crate::io::{classify, emit, input, load_chain, load_program, to_json, CmdResult};
use crate::RunInputs;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub inputs: RunInputs,
    /// Probability that each reported measurement value is flipped.
    #[arg(long, default_value_t = 0.0)]
    pub readout_error: f64,
    /// Enables T1 relaxation toward the pumped state (seconds).
    #[arg(long)]
    pub t1: Option<f64>,
    /// Include the final amplitudes in the result file.
    #[arg(long)]
    pub emit_state: bool,
    /// Result file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: ToolInfo = ToolInfo {
    name: "qhall",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Serialize)]
struct Settings<'a> {
    chain_file: &'a str,
    program_file: &'a str,
    seed: u64,
    readout_error: f64,
    t1_seconds: Option<f64>,
}

#[derive(Serialize)]
struct Measurement<'a> {
    kind: MeasurementKind,
    targets: &'a [usize],
    values: &'a [i8],
    probability: f64,
}

#[derive(Serialize)]
struct ResultFile<'a> {
    tool: ToolInfo,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    timestamp: u64,
    settings: Settings<'a>,
    program: &'a str,
    qubits: usize,
    total_duration_s: f64,
    segment_count: usize,
    measurements: Vec<Measurement<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_state: Option<Vec<[f64; 2]>>,
}

pub fn run(args: &Args) -> CmdResult {
    let spec = load_chain(&args.inputs.chain)?;
    let program = load_program(&args.inputs.program, &spec)?;
    let noise = match args.t1 {
        Some(t1) => NoiseParams::t1(t1),
        None => NoiseParams::disabled(),
    };
    noise.validate().map_err(input)?;
    let options = RunOptions::seeded(args.inputs.seed)
        .with_readout_error(args.readout_error)
        .with_noise(noise);
    let result = Interpreter::new(&spec)
        .run(&program, &options)
        .map_err(classify)?;

    let chain_file = args.inputs.chain.to_string_lossy();
    let program_file = args.inputs.program.to_string_lossy();
    let file = ResultFile {
        tool: TOOL,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        settings: Settings {
            chain_file: &chain_file,
            program_file: &program_file,
            seed: args.inputs.seed,
            readout_error: args.readout_error,
            t1_seconds: args.t1,
        },
        program: &program.name,
        qubits: spec.n(),
        total_duration_s: result.total_duration,
        segment_count: result.segment_count,
        measurements: result
            .measurement_log
            .iter()
            .map(|m| Measurement {
                kind: m.kind,
                targets: &m.targets,
                values: &m.values,
                probability: m.probability,
            })
            .collect(),
        final_state: args.emit_state.then(|| {
            result
                .final_state
                .amplitudes()
                .iter()
                .map(|z| [z.re, z.im])
                .collect()
        }),
    };
    emit(args.output.as_ref(), &to_json(&file)?)
}

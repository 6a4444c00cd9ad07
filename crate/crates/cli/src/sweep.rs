use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::ValueEnum;
use qhall::ensemble::{replica_seeds, run_ensemble, sample_replica, Observable};
use qhall::{ChainSpec, DisorderParams, Program};
use rayon::prelude::*;

use crate::io::{
    classify, emit, input, load_chain, load_program, CmdResult, Failure, ObservableArg,
};
use crate::RunInputs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Param {
    /// Applied field in tesla; the coupling prefactor is held fixed.
    Field,
    /// Distance from nucleus 0 to nucleus 1 in nm; the layout scales about nucleus 0.
    Spacing,
    /// Replica coupling-scale standard deviation.
    CouplingSigma,
}

/// `a:b:steps`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| self.start + (self.end - self.start) * k as f64 / last)
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected a:b:steps, got {s:?}"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("bad number {t:?} in range"))
        };
        let steps = n
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("bad step count {n:?} in range"))?;
        if steps == 0 {
            return Err("range needs at least one step".into());
        }
        Ok(Self {
            start: num(a)?,
            end: num(b)?,
            steps,
        })
    }
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub inputs: RunInputs,
    #[arg(long, value_enum)]
    pub param: Param,
    /// Inclusive range `a:b:steps`.
    #[arg(long)]
    pub range: Range,
    /// `z:<qubits>` after the program, or `coupling:<i>,<j>` of the chain.
    #[arg(long)]
    pub observable: ObservableArg,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    /// Position jitter sigma (nm) applied at every step.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    /// Coupling-scale sigma applied at every step unless swept.
    #[arg(long, default_value_t = 0.0)]
    pub coupling_sigma: f64,
    /// CSV file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

struct Row {
    param: f64,
    mean: f64,
    std_error: f64,
    replicas: usize,
}

fn apply(
    base: &ChainSpec,
    disorder: &DisorderParams,
    param: Param,
    value: f64,
) -> CmdResult<(ChainSpec, DisorderParams)> {
    let mut spec = base.clone();
    let mut disorder = *disorder;
    match param {
        Param::Field => spec.field = value,
        Param::Spacing => {
            if spec.n() < 2 {
                return Err(input(anyhow!("a spacing sweep needs at least two nuclei")));
            }
            let scale = value / base.separation(0, 1);
            let origin = base.positions[0];
            for p in &mut spec.positions {
                p[0] = origin[0] + (p[0] - origin[0]) * scale;
                p[1] = origin[1] + (p[1] - origin[1]) * scale;
            }
        }
        Param::CouplingSigma => disorder.coupling_scale_sigma = value,
    }
    spec.validate()
        .with_context(|| format!("at {param:?} = {value}"))
        .map_err(input)?;
    disorder.validate().map_err(classify)?;
    Ok((spec, disorder))
}

fn step(
    spec: &ChainSpec,
    disorder: &DisorderParams,
    program: &Program,
    args: &Args,
) -> CmdResult<(f64, f64)> {
    match &args.observable {
        ObservableArg::Z(qubits) => {
            let report = run_ensemble(
                program,
                spec,
                disorder,
                &Observable::z_product(qubits.clone()),
                args.replicas,
                args.inputs.seed,
            )
            .map_err(classify)?;
            Ok((report.mean, report.std_error))
        }
        ObservableArg::Coupling(i, j) => {
            let values = replica_seeds(args.inputs.seed, args.replicas)
                .into_par_iter()
                .map(|s| sample_replica(spec, disorder, s)?.pair_coupling(*i, *j))
                .collect::<qhall::Result<Vec<f64>>>()
                .map_err(classify)?;
            Ok(mean_and_error(&values))
        }
    }
}

/// Same estimator as the ensemble report: shifted sums, zero for one value.
fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let shift = values[0];
    let m = values.iter().map(|v| v - shift).sum::<f64>() / r;
    if values.len() == 1 {
        return (shift + m, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - shift - m).powi(2)).sum();
    (shift + m, (ss / (r - 1.0)).sqrt() / r.sqrt())
}

pub fn run(args: &Args) -> CmdResult {
    if args.replicas == 0 {
        return Err(input(anyhow!("--replicas must be at least 1")));
    }
    let base = load_chain(&args.inputs.chain)?;
    let program = load_program(&args.inputs.program, &base)?;
    let disorder = DisorderParams {
        position_jitter_sigma: args.jitter,
        coupling_scale_sigma: args.coupling_sigma,
        readout_error: 0.0,
    };
    disorder.validate().map_err(classify)?;

    let mut rows = Vec::with_capacity(args.range.steps);
    for value in args.range.values() {
        let (spec, disorder) = apply(&base, &disorder, args.param, value)?;
        let (mean, std_error) = step(&spec, &disorder, &program, args)?;
        rows.push(Row {
            param: value,
            mean,
            std_error,
            replicas: args.replicas,
        });
    }

    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::Internal(e.into());
    writer
        .write_record(["param", "mean", "std_error", "replicas"])
        .map_err(csv_err)?;
    for r in &rows {
        writer
            .write_record([
                r.param.to_string(),
                r.mean.to_string(),
                r.std_error.to_string(),
                r.replicas.to_string(),
            ])
            .map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Failure::Internal(anyhow!("csv flush failed: {e}")))?;
    let text = String::from_utf8(bytes).map_err(|e| Failure::Internal(e.into()))?;
    emit(args.output.as_ref(), &text)
}

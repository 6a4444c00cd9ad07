use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use qhall::control::validate;
use qhall::schema::ChainSpecFile;
use qhall::{ChainSpec, Program};

/// How a command failed; decides the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable, malformed or invalid input.
    Input(anyhow::Error),
    NotConverged,
    Internal(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NotConverged => 3,
            Failure::Internal(_) => 1,
        }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

/// Library errors caused by the user's inputs map to exit code 2.
pub fn classify(e: qhall::Error) -> Failure {
    use qhall::Error::*;
    match e {
        Domain(_)
        | QubitOutOfRange { .. }
        | QubitCount { .. }
        | Validation(_)
        | NotSynthesizable(_)
        | Unsupported(_) => Failure::Input(e.into()),
        DimensionMismatch { .. } | NotHermitian { .. } => Failure::Internal(e.into()),
    }
}

fn read(path: &Path, what: &str) -> CmdResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {what} file {}", path.display()))
        .map_err(input)
}

pub fn load_chain(path: &Path) -> CmdResult<ChainSpec> {
    let text = read(path, "chain")?;
    ChainSpecFile::from_json(&text)
        .and_then(|f| f.to_spec())
        .with_context(|| format!("in {}", path.display()))
        .map_err(input)
}

/// Parses the program and checks it against `spec`, reporting every
/// diagnostic at once.
pub fn load_program(path: &Path, spec: &ChainSpec) -> CmdResult<Program> {
    let text = read(path, "program")?;
    let program = Program::from_json(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(input)?;
    let diagnostics = validate(&program, spec);
    if !diagnostics.is_empty() {
        let lines: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
        return Err(input(anyhow!(
            "{} is invalid:\n  {}",
            path.display(),
            lines.join("\n  ")
        )));
    }
    Ok(program)
}

/// Writes `text` to `path`, or stdout when no path is given.
pub fn emit(path: Option<&PathBuf>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::Internal),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .context("cannot write to stdout")
                .map_err(Failure::Internal)
        }
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> CmdResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .context("serialization failed")
        .map_err(Failure::Internal)
}

/// `z:0,2` (σ_z product) or `coupling:0,1` (pair coupling of the replica).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObservableArg {
    Z(Vec<usize>),
    Coupling(usize, usize),
}

impl std::str::FromStr for ObservableArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, list) = s
            .split_once(':')
            .ok_or_else(|| format!("expected z:<qubits> or coupling:<i>,<j>, got {s:?}"))?;
        let qubits = list
            .split(',')
            .map(|q| q.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("bad qubit list {list:?}: {e}"))?;
        match (kind, qubits.as_slice()) {
            ("z", qs) if !qs.is_empty() => Ok(Self::Z(qubits)),
            ("coupling", &[i, j]) => Ok(Self::Coupling(i, j)),
            ("coupling", _) => Err("coupling takes exactly two qubits".into()),
            _ => Err(format!("unknown observable kind {kind:?}")),
        }
    }
}

impl std::fmt::Display for ObservableArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Z(qs) => {
                let list: Vec<String> = qs.iter().map(ToString::to_string).collect();
                write!(f, "z:{}", list.join(","))
            }
            Self::Coupling(i, j) => write!(f, "coupling:{i},{j}"),
        }
    }
}

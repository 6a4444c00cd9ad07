use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::MeasurementKind;
use crate::error::{domain, Result};
use crate::model::ChainSpec;
use crate::scalar::Real;

/// One instruction of the machine.
///
/// The JSON form is internally tagged by `"type"`:
/// `init`, `delay`, `pulse`, `switch`, `measure`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub enum ControlEvent<T> {
    /// Optical pumping of every spin into `|0⟩`. Only valid as the first event.
    #[serde(rename = "init")]
    InitializePumped {},
    /// Free evolution under the always-on Hamiltonian and the current mask.
    Delay { seconds: T },
    /// Hard rotation `exp(-i·angle·(axis·σ)/2)` of one spin.
    Pulse {
        target: usize,
        axis: [T; 3],
        angle: T,
    },
    /// Sets the switch factor of one pair for subsequent delays.
    #[serde(rename = "switch")]
    SetSwitch { pair: [usize; 2], factor: T },
    Measure {
        kind: MeasurementKind,
        targets: Vec<usize>,
    },
}

impl<T: Real> ControlEvent<T> {
    pub fn delay(seconds: T) -> Self {
        Self::Delay { seconds }
    }

    pub fn pulse(target: usize, axis: [T; 3], angle: T) -> Self {
        Self::Pulse {
            target,
            axis,
            angle,
        }
    }

    pub fn x(target: usize, angle: T) -> Self {
        Self::pulse(target, [T::one(), T::zero(), T::zero()], angle)
    }

    pub fn y(target: usize, angle: T) -> Self {
        Self::pulse(target, [T::zero(), T::one(), T::zero()], angle)
    }

    pub fn z(target: usize, angle: T) -> Self {
        Self::pulse(target, [T::zero(), T::zero(), T::one()], angle)
    }

    pub fn switch(i: usize, j: usize, factor: T) -> Self {
        Self::SetSwitch {
            pair: [i, j],
            factor,
        }
    }

    pub fn measure_single(target: usize) -> Self {
        Self::Measure {
            kind: MeasurementKind::Single,
            targets: vec![target],
        }
    }

    pub fn measure_mask(targets: Vec<usize>) -> Self {
        Self::Measure {
            kind: MeasurementKind::Mask,
            targets,
        }
    }

    pub fn measure_difference(i: usize, j: usize) -> Self {
        Self::Measure {
            kind: MeasurementKind::Difference,
            targets: vec![i, j],
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Self::Measure { .. })
    }
}

/// An ordered list of control events plus descriptive metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Program<T> {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub events: Vec<ControlEvent<T>>,
}

impl<T: Real> Program<T> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            events: Vec::new(),
        }
    }

    pub fn with_events(name: impl Into<String>, events: Vec<ControlEvent<T>>) -> Self {
        Self {
            events,
            ..Self::new(name)
        }
    }

    pub fn push(&mut self, event: ControlEvent<T>) -> &mut Self {
        self.events.push(event);
        self
    }

    pub fn extend(&mut self, events: impl IntoIterator<Item = ControlEvent<T>>) -> &mut Self {
        self.events.extend(events);
        self
    }

    /// Sum of all delay durations.
    pub fn total_delay(&self) -> T {
        self.events.iter().fold(T::zero(), |acc, e| match e {
            ControlEvent::Delay { seconds } => acc + *seconds,
            _ => acc,
        })
    }

    pub fn has_measurements(&self) -> bool {
        self.events.iter().any(ControlEvent::is_measurement)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| domain(format!("invalid program JSON: {e}")))
    }
}

/// A problem found by [`validate`], tied to an event index when applicable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub event: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.event {
            Some(k) => write!(f, "event {k}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks every event against the chain; an empty result means the program
/// can run.
pub fn validate<T: Real>(program: &Program<T>, spec: &ChainSpec<T>) -> Vec<Diagnostic> {
    let n = spec.n();
    let mut out = Vec::new();
    let mut push = |k: usize, message: String| {
        out.push(Diagnostic {
            event: Some(k),
            message,
        })
    };
    let qubit_ok = |q: usize| q < n;

    for (k, event) in program.events.iter().enumerate() {
        match event {
            ControlEvent::InitializePumped {} => {
                if k != 0 {
                    push(k, "init may only appear as the first event".into());
                }
            }
            ControlEvent::Delay { seconds } => {
                if !(seconds.is_finite() && *seconds >= T::zero()) {
                    push(k, format!("delay must be finite and >= 0, got {seconds}"));
                }
            }
            ControlEvent::Pulse {
                target,
                axis,
                angle,
            } => {
                if !qubit_ok(*target) {
                    push(
                        k,
                        format!("pulse target {target} out of range for {n} qubits"),
                    );
                }
                let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
                let tol = T::lit(1e-9).max(T::structural_tolerance());
                if !((len - T::one()).abs() <= tol) {
                    push(k, format!("pulse axis has length {len}, expected 1"));
                }
                if !angle.is_finite() {
                    push(k, "pulse angle is not finite".into());
                }
            }
            ControlEvent::SetSwitch { pair, factor } => {
                let [i, j] = *pair;
                if !qubit_ok(i) || !qubit_ok(j) {
                    push(
                        k,
                        format!("switch pair ({i}, {j}) out of range for {n} qubits"),
                    );
                } else if i == j {
                    push(k, format!("switch pair ({i}, {j}) is not a pair"));
                }
                if !(*factor >= T::zero() && *factor <= T::one()) {
                    push(k, format!("switch factor {factor} outside [0, 1]"));
                }
            }
            ControlEvent::Measure { kind, targets } => {
                if targets.is_empty() {
                    push(k, "measurement has no targets".into());
                }
                for &t in targets {
                    if !qubit_ok(t) {
                        push(
                            k,
                            format!("measurement target {t} out of range for {n} qubits"),
                        );
                    }
                }
                let distinct = targets
                    .iter()
                    .enumerate()
                    .all(|(a, t)| !targets[..a].contains(t));
                if !distinct {
                    push(k, "measurement targets repeat".into());
                }
                match kind {
                    MeasurementKind::Single if targets.len() != 1 => {
                        push(k, "single measurement takes exactly one target".into())
                    }
                    MeasurementKind::Difference if targets.len() != 2 => {
                        push(k, "difference measurement takes exactly two targets".into())
                    }
                    _ => {}
                }
            }
        }
    }
    out
}

use crate::control::{ControlEvent, Program};
use crate::error::{domain, Error, Result};
use crate::model::ChainSpec;
use crate::scalar::Real;

use super::closed_form::zeeman_corrections;
use super::target::TargetUnitary;

/// How a free parameter is seeded at the start of an optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Rotation angle, seeded uniformly in `[-π, π]`.
    Angle,
    /// Delay in template units, seeded uniformly in `[0, π]`.
    Duration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param<T> {
    Fixed(T),
    Free(usize),
}

impl<T: Real> Param<T> {
    fn value(&self, params: &[T]) -> T {
        match *self {
            Param::Fixed(v) => v,
            Param::Free(k) => params[k],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplateEvent<T> {
    /// A delay of `|value|·unit` seconds.
    Delay {
        value: Param<T>,
        unit: T,
    },
    Rotation {
        target: usize,
        axis: [T; 3],
        angle: Param<T>,
    },
    /// `R_z(c)·R_y(b)·R_z(a)`, emitted as three pulses.
    Euler {
        target: usize,
        angles: [Param<T>; 3],
    },
    Switch {
        pair: [usize; 2],
        factor: T,
    },
    /// Zeeman corrections for all delay time elapsed so far.
    ZeemanCorrection {
        qubits: Vec<usize>,
    },
}

/// A parameterized program skeleton for the numerical compiler.
#[derive(Debug, Clone, PartialEq)]
pub struct Template<T> {
    pub name: String,
    pub events: Vec<TemplateEvent<T>>,
    pub kinds: Vec<ParamKind>,
}

struct Builder<T> {
    events: Vec<TemplateEvent<T>>,
    kinds: Vec<ParamKind>,
}

impl<T: Real> Builder<T> {
    fn free(&mut self, kind: ParamKind) -> Param<T> {
        self.kinds.push(kind);
        Param::Free(self.kinds.len() - 1)
    }

    fn euler(&mut self, target: usize) {
        let angles = [
            self.free(ParamKind::Angle),
            self.free(ParamKind::Angle),
            self.free(ParamKind::Angle),
        ];
        self.events.push(TemplateEvent::Euler { target, angles });
    }
}

impl<T: Real> Template<T> {
    pub fn new(
        name: impl Into<String>,
        events: Vec<TemplateEvent<T>>,
        kinds: Vec<ParamKind>,
    ) -> Result<Self> {
        let mut used = vec![false; kinds.len()];
        let mut mark = |p: &Param<T>| -> Result<()> {
            if let Param::Free(k) = *p {
                *used
                    .get_mut(k)
                    .ok_or_else(|| domain(format!("parameter {k} has no declared kind")))? = true;
            }
            Ok(())
        };
        for e in &events {
            match e {
                TemplateEvent::Delay { value, .. } => mark(value)?,
                TemplateEvent::Rotation { angle, .. } => mark(angle)?,
                TemplateEvent::Euler { angles, .. } => angles.iter().try_for_each(&mut mark)?,
                _ => {}
            }
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(domain(format!("parameter {k} is never used")));
        }
        Ok(Self {
            name: name.into(),
            events,
            kinds,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.kinds.len()
    }

    /// Euler layers on both spins of `pair` interleaved with `layers`
    /// free flip-flop delays (in units of `1/J`). Other coupled pairs are
    /// switched off throughout and the remaining spins get Zeeman corrections.
    pub fn layered(spec: &ChainSpec<T>, pair: (usize, usize), layers: usize) -> Result<Self> {
        let (i, j) = pair;
        let jij = spec.pair_coupling(i, j)?;
        if layers > 0 && jij == T::zero() {
            return Err(Error::NotSynthesizable(format!(
                "pair ({i}, {j}) has no exchange coupling"
            )));
        }
        let n = spec.n();
        let mut others = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if (a, b) != (i.min(j), i.max(j)) && spec.pair_coupling(a, b)? != T::zero() {
                    others.push([a, b]);
                }
            }
        }
        let mut bld = Builder {
            events: Vec::new(),
            kinds: Vec::new(),
        };
        for &pair in &others {
            bld.events.push(TemplateEvent::Switch {
                pair,
                factor: T::zero(),
            });
        }
        bld.euler(i);
        bld.euler(j);
        for _ in 0..layers {
            let value = bld.free(ParamKind::Duration);
            bld.events.push(TemplateEvent::Delay {
                value,
                unit: T::one() / jij,
            });
            bld.euler(i);
            bld.euler(j);
        }
        for &pair in &others {
            bld.events.push(TemplateEvent::Switch {
                pair,
                factor: T::one(),
            });
        }
        let spectators: Vec<usize> = (0..n).filter(|&q| q != i && q != j).collect();
        if layers > 0 && !spectators.is_empty() {
            bld.events
                .push(TemplateEvent::ZeemanCorrection { qubits: spectators });
        }
        Self::new(format!("layered({i},{j})x{layers}"), bld.events, bld.kinds)
    }

    /// A single Euler rotation of one spin.
    pub fn single_qubit(spec: &ChainSpec<T>, target: usize) -> Result<Self> {
        if target >= spec.n() {
            return Err(Error::QubitOutOfRange {
                index: target,
                n: spec.n(),
            });
        }
        let mut bld = Builder {
            events: Vec::new(),
            kinds: Vec::new(),
        };
        bld.euler(target);
        Self::new(format!("euler({target})"), bld.events, bld.kinds)
    }

    /// Layer count that suffices for the named standard gates.
    pub fn for_target(spec: &ChainSpec<T>, target: &TargetUnitary<T>) -> Result<Self> {
        match target.qubits.as_slice() {
            [q] => Self::single_qubit(spec, *q),
            [i, j] => {
                let layers = match target.name.as_str() {
                    "iswap" => 1,
                    "cnot" => 2,
                    _ => 3,
                };
                Self::layered(spec, (*i, *j), layers)
            }
            qs => Err(Error::Unsupported(format!(
                "no default template for {} qubits",
                qs.len()
            ))),
        }
    }

    pub fn instantiate(&self, spec: &ChainSpec<T>, params: &[T]) -> Result<Program<T>> {
        if params.len() != self.kinds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.kinds.len(),
                got: params.len(),
            });
        }
        let mut program = Program::new(self.name.clone());
        let mut elapsed = T::zero();
        for e in &self.events {
            match e {
                TemplateEvent::Delay { value, unit } => {
                    let t = value.value(params).abs() * *unit;
                    elapsed += t;
                    program.push(ControlEvent::delay(t));
                }
                TemplateEvent::Rotation {
                    target,
                    axis,
                    angle,
                } => {
                    program.push(ControlEvent::pulse(*target, *axis, angle.value(params)));
                }
                TemplateEvent::Euler { target, angles } => {
                    let [a, b, c] = angles.map(|p| p.value(params));
                    program.push(ControlEvent::z(*target, a));
                    program.push(ControlEvent::y(*target, b));
                    program.push(ControlEvent::z(*target, c));
                }
                TemplateEvent::Switch { pair, factor } => {
                    program.push(ControlEvent::switch(pair[0], pair[1], *factor));
                }
                TemplateEvent::ZeemanCorrection { qubits } => {
                    program.extend(zeeman_corrections(spec, qubits.iter().copied(), elapsed));
                }
            }
        }
        Ok(program)
    }
}

//! Replicas of the chain driven by the same control program.
//!
//! Two readout philosophies are kept apart: [`run_ensemble`] records the
//! exact expectation value of each replica's final state (NMR-style
//! averaging), while [`majority_readout`] takes one noisy single shot per
//! replica and votes.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{ControlEvent, Interpreter, Program, RunOptions};
use crate::engine::{measure_single, StateVector};
use crate::error::{domain, Result};
use crate::model::ChainSpec;
use crate::scalar::{c_real, Real, C};

/// Lower truncation of the per-replica coupling factor `1 + δ`.
const MIN_COUPLING_DELTA: f64 = -0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderParams<T> {
    /// Isotropic Gaussian jitter of every spin position, nm.
    pub position_jitter_sigma: T,
    /// Standard deviation of `δ` in the replica coupling factor `1 + δ`.
    pub coupling_scale_sigma: T,
    pub readout_error: T,
}

impl<T: Real> DisorderParams<T> {
    pub fn none() -> Self {
        Self {
            position_jitter_sigma: T::zero(),
            coupling_scale_sigma: T::zero(),
            readout_error: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |s: T| s.is_finite() && s >= T::zero();
        if !ok(self.position_jitter_sigma) || !ok(self.coupling_scale_sigma) {
            return Err(domain("disorder sigmas must be finite and >= 0"));
        }
        if !(self.readout_error >= T::zero() && self.readout_error < T::lit(0.5)) {
            return Err(domain(format!(
                "readout error {} outside [0, 0.5)",
                self.readout_error
            )));
        }
        Ok(())
    }
}

impl<T: Real> Default for DisorderParams<T> {
    fn default() -> Self {
        Self::none()
    }
}

/// Phenomenological relaxation toward the pumped state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams<T> {
    /// Seconds; infinity disables.
    pub t1: T,
    pub enabled: bool,
}

impl<T: Real> NoiseParams<T> {
    pub fn disabled() -> Self {
        Self {
            t1: T::lit(f64::INFINITY),
            enabled: false,
        }
    }

    pub fn t1(t1: T) -> Self {
        Self { t1, enabled: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled && !(self.t1 > T::zero()) {
            return Err(domain(format!("T1 must be positive, got {}", self.t1)));
        }
        Ok(())
    }
}

/// Per-qubit reset probability `1 - exp(-dt/T1)` for one segment.
pub fn t1_jump_probability<T: Real>(dt: T, noise: &NoiseParams<T>) -> T {
    if !noise.enabled || !noise.t1.is_finite() {
        return T::zero();
    }
    -(-(dt / noise.t1)).exp_m1()
}

/// One quantum-trajectory step of T1 relaxation: each spin independently,
/// with probability `1 - exp(-dt/T1)`, is measured in σ_z and reset to
/// `|0⟩` if found down.
pub fn apply_t1_channel<T: Real>(
    state: &StateVector<T>,
    dt: T,
    noise: &NoiseParams<T>,
    rng: &mut impl Rng,
) -> Result<StateVector<T>> {
    noise.validate()?;
    if !(dt.is_finite() && dt >= T::zero()) {
        return Err(domain(format!("segment duration must be >= 0, got {dt}")));
    }
    if !noise.enabled {
        return Ok(state.clone());
    }
    let p = t1_jump_probability(dt, noise).as_f64();
    let flip = {
        let (o, l) = (C::<T>::default(), c_real(T::one()));
        [[o, l], [l, o]]
    };
    let mut out = state.clone();
    for q in 0..state.n() {
        if rng.random_bool(p) {
            let m = measure_single(&out, q, T::zero(), rng)?;
            out = m.post_state;
            if m.values[0] == -1 {
                out.apply_single_qubit(q, &flip)?;
            }
        }
    }
    Ok(out)
}

/// Draws one replica of `spec`: jittered positions and a scaled coupling.
/// Deterministic per seed; zero sigmas return a copy of `spec`.
pub fn sample_replica<T: Real>(
    spec: &ChainSpec<T>,
    disorder: &DisorderParams<T>,
    seed: u64,
) -> Result<ChainSpec<T>> {
    disorder.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut replica = spec.clone();
    let sigma = disorder.position_jitter_sigma.as_f64();
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).map_err(|e| domain(e.to_string()))?;
        for p in &mut replica.positions {
            p[0] += T::lit(normal.sample(&mut rng));
            p[1] += T::lit(normal.sample(&mut rng));
        }
    }
    let sigma_c = disorder.coupling_scale_sigma.as_f64();
    if sigma_c > 0.0 {
        let normal = Normal::new(0.0, sigma_c).map_err(|e| domain(e.to_string()))?;
        let delta = loop {
            let d = normal.sample(&mut rng);
            if d > MIN_COUPLING_DELTA {
                break d;
            }
        };
        replica.coupling_scale *= T::lit(1.0 + delta);
    }
    replica.validate()?;
    Ok(replica)
}

/// Product of σ_z over a set of spins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observable {
    pub qubits: Vec<usize>,
}

impl Observable {
    pub fn z(qubit: usize) -> Self {
        Self {
            qubits: vec![qubit],
        }
    }

    pub fn z_product(qubits: Vec<usize>) -> Self {
        Self { qubits }
    }

    pub fn expectation<T: Real>(&self, state: &StateVector<T>) -> Result<T> {
        state.expectation_z_product(&self.qubits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord<T> {
    pub seed: u64,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport<T> {
    pub per_replica: Vec<ReplicaRecord<T>>,
    pub mean: T,
    /// Sample standard deviation over `sqrt(R)`; zero for one replica.
    pub std_error: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majority_value: Option<i8>,
}

impl<T: Real> EnsembleReport<T> {
    fn from_records(per_replica: Vec<ReplicaRecord<T>>) -> Self {
        let r = per_replica.len();
        let rf = T::lit(r as f64);
        // Shifted by the first value so identical replicas give exactly zero.
        let shift = per_replica.first().map_or(T::zero(), |x| x.value);
        let mean_shifted = per_replica
            .iter()
            .fold(T::zero(), |a, x| a + (x.value - shift))
            / rf;
        let mean = shift + mean_shifted;
        let std_error = if r > 1 {
            let ss = per_replica.iter().fold(T::zero(), |a, x| {
                let d = x.value - shift - mean_shifted;
                a + d * d
            });
            (ss / T::lit((r - 1) as f64)).sqrt() / rf.sqrt()
        } else {
            T::zero()
        };
        Self {
            per_replica,
            mean,
            std_error,
            majority_value: None,
        }
    }

    pub fn replicas(&self) -> usize {
        self.per_replica.len()
    }
}

/// Independent per-replica seeds derived from a master seed.
pub fn replica_seeds(master: u64, replicas: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..replicas).map(|_| rng.next_u64()).collect()
}

fn run_seed(replica_seed: u64) -> u64 {
    // Keeps disorder draws and measurement draws on distinct streams.
    let mut rng = ChaCha8Rng::seed_from_u64(replica_seed);
    rng.set_stream(1);
    rng.next_u64()
}

/// Expectation of `observable` after `program`, across disordered replicas.
pub fn run_ensemble<T: Real>(
    program: &Program<T>,
    spec: &ChainSpec<T>,
    disorder: &DisorderParams<T>,
    observable: &Observable,
    replicas: usize,
    seed: u64,
) -> Result<EnsembleReport<T>> {
    run_ensemble_with_noise(
        program,
        spec,
        disorder,
        observable,
        replicas,
        seed,
        &NoiseParams::disabled(),
    )
}

pub fn run_ensemble_with_noise<T: Real>(
    program: &Program<T>,
    spec: &ChainSpec<T>,
    disorder: &DisorderParams<T>,
    observable: &Observable,
    replicas: usize,
    seed: u64,
    noise: &NoiseParams<T>,
) -> Result<EnsembleReport<T>> {
    if replicas == 0 {
        return Err(domain("an ensemble needs at least one replica"));
    }
    disorder.validate()?;
    for &q in &observable.qubits {
        if q >= spec.n() {
            return Err(crate::error::Error::QubitOutOfRange {
                index: q,
                n: spec.n(),
            });
        }
    }
    let records = replica_seeds(seed, replicas)
        .into_par_iter()
        .map(|s| {
            let replica = sample_replica(spec, disorder, s)?;
            let options = RunOptions::seeded(run_seed(s))
                .with_readout_error(disorder.readout_error)
                .with_noise(*noise);
            let result = Interpreter::new(&replica).run(program, &options)?;
            Ok(ReplicaRecord {
                seed: s,
                value: observable.expectation(&result.final_state)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleReport::from_records(records))
}

/// Single-shot readout of `target` on `replicas` copies prepared by
/// `preparer`, combined by majority vote. `replicas` must be odd.
pub fn majority_readout<T: Real>(
    preparer: &Program<T>,
    spec: &ChainSpec<T>,
    target: usize,
    replicas: usize,
    readout_error: T,
    seed: u64,
) -> Result<EnsembleReport<T>> {
    if replicas.is_multiple_of(2) {
        return Err(domain(format!(
            "majority readout needs an odd replica count, got {replicas}"
        )));
    }
    let mut program = preparer.clone();
    program.push(ControlEvent::measure_single(target));
    let interp = Interpreter::new(spec);
    let records = replica_seeds(seed, replicas)
        .into_par_iter()
        .map(|s| {
            let options = RunOptions::seeded(run_seed(s)).with_readout_error(readout_error);
            let result = interp.run(&program, &options)?;
            let shot = result
                .measurement_log
                .last()
                .expect("appended measurement is logged")
                .values[0];
            Ok(ReplicaRecord {
                seed: s,
                value: T::lit(f64::from(shot)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = EnsembleReport::from_records(records);
    report.majority_value = Some(if report.mean > T::zero() { 1 } else { -1 });
    Ok(report)
}

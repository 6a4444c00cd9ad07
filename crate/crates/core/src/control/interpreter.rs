use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    apply_single_qubit_slice, measure_difference, measure_mask, measure_single, rotation_matrix,
    Eigensystem, MeasurementKind, MeasurementOutcome, Propagator, StateVector,
};
use crate::ensemble::{apply_t1_channel, NoiseParams};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, ChainSpec, SwitchMask};
use crate::scalar::{Real, C};

use super::program::{validate, ControlEvent, Program};

/// Knobs for [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions<T> {
    pub seed: u64,
    pub readout_error: T,
    pub noise: NoiseParams<T>,
}

impl<T: Real> RunOptions<T> {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            readout_error: T::zero(),
            noise: NoiseParams::disabled(),
        }
    }

    pub fn with_readout_error(mut self, eps: T) -> Self {
        self.readout_error = eps;
        self
    }

    pub fn with_noise(mut self, noise: NoiseParams<T>) -> Self {
        self.noise = noise;
        self
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<T: Real> {
    pub final_state: StateVector<T>,
    pub measurement_log: Vec<MeasurementOutcome<T>>,
    /// Sum of delay durations, seconds.
    pub total_duration: T,
    /// Number of delay segments executed.
    pub segment_count: usize,
    pub final_mask: SwitchMask<T>,
}

type MaskKey = Vec<u64>;
type PropagatorMap<T> = HashMap<(MaskKey, u64), Arc<Propagator<T>>>;

fn mask_key<T: Real>(mask: &SwitchMask<T>) -> MaskKey {
    let n = mask.n();
    let mut key = Vec::with_capacity(n * n / 2 + 1);
    key.push(n as u64);
    for i in 0..n {
        for j in i + 1..n {
            key.push(mask.get(i, j).map(|f| f.as_f64().to_bits()).unwrap_or(0));
        }
    }
    key
}

const PROPAGATOR_CACHE_LIMIT: usize = 512;

/// Eigendecompositions per switch mask and propagators per
/// (mask, duration). Readers share; insertion takes the write lock.
#[derive(Debug, Default)]
pub struct PropagatorCache<T: Real> {
    eigen: RwLock<HashMap<MaskKey, Arc<Eigensystem<T>>>>,
    propagators: RwLock<PropagatorMap<T>>,
}

impl<T: Real> PropagatorCache<T> {
    pub fn new() -> Self {
        Self {
            eigen: RwLock::new(HashMap::new()),
            propagators: RwLock::new(HashMap::new()),
        }
    }

    pub fn eigensystem_count(&self) -> usize {
        self.eigen.read().expect("cache lock").len()
    }

    fn eigensystem(
        &self,
        spec: &ChainSpec<T>,
        mask: &SwitchMask<T>,
    ) -> Result<Arc<Eigensystem<T>>> {
        let key = mask_key(mask);
        if let Some(e) = self.eigen.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(e));
        }
        let e = Arc::new(Eigensystem::new(&build_hamiltonian(spec, mask)?)?);
        self.eigen
            .write()
            .expect("cache lock")
            .entry(key)
            .or_insert_with(|| Arc::clone(&e));
        Ok(e)
    }

    fn propagator(
        &self,
        spec: &ChainSpec<T>,
        mask: &SwitchMask<T>,
        duration: T,
    ) -> Result<Arc<Propagator<T>>> {
        let key = (mask_key(mask), duration.as_f64().to_bits());
        if let Some(p) = self.propagators.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(p));
        }
        let p = Arc::new(
            self.eigensystem(spec, mask)?
                .propagator(duration)?
                .with_mask_hash(mask.hash_key()),
        );
        let mut map = self.propagators.write().expect("cache lock");
        if map.len() < PROPAGATOR_CACHE_LIMIT {
            map.entry(key).or_insert_with(|| Arc::clone(&p));
        }
        Ok(p)
    }
}

/// Runs programs against one chain, reusing segment propagators.
#[derive(Debug)]
pub struct Interpreter<'a, T: Real> {
    spec: &'a ChainSpec<T>,
    cache: PropagatorCache<T>,
}

impl<'a, T: Real> Interpreter<'a, T> {
    pub fn new(spec: &'a ChainSpec<T>) -> Self {
        Self {
            spec,
            cache: PropagatorCache::new(),
        }
    }

    pub fn spec(&self) -> &ChainSpec<T> {
        self.spec
    }

    pub fn cache(&self) -> &PropagatorCache<T> {
        &self.cache
    }

    pub fn idle_propagator(&self, mask: &SwitchMask<T>, duration: T) -> Result<Arc<Propagator<T>>> {
        self.cache.propagator(self.spec, mask, duration)
    }

    fn check(&self, program: &Program<T>) -> Result<()> {
        self.spec.validate()?;
        let diagnostics = validate(program, self.spec);
        if diagnostics.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(diagnostics))
        }
    }

    pub fn run(&self, program: &Program<T>, options: &RunOptions<T>) -> Result<RunResult<T>> {
        self.run_from(program, StateVector::pumped(self.spec.n())?, options)
    }

    /// Runs from an explicit initial state (replaced if the program begins
    /// with `init`).
    pub fn run_from(
        &self,
        program: &Program<T>,
        initial: StateVector<T>,
        options: &RunOptions<T>,
    ) -> Result<RunResult<T>> {
        self.check(program)?;
        let n = self.spec.n();
        if initial.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: initial.n(),
            });
        }
        options.noise.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let mut state = initial;
        let mut mask = SwitchMask::all_on(n);
        let mut log = Vec::new();
        let mut total = T::zero();
        let mut segments = 0;

        for event in &program.events {
            match event {
                ControlEvent::InitializePumped {} => state = StateVector::pumped(n)?,
                ControlEvent::Delay { seconds } => {
                    let u = self.idle_propagator(&mask, *seconds)?;
                    u.apply_in_place(state.amplitudes_mut())?;
                    total += *seconds;
                    segments += 1;
                    if options.noise.enabled {
                        state = apply_t1_channel(&state, *seconds, &options.noise, &mut rng)?;
                    }
                }
                ControlEvent::Pulse {
                    target,
                    axis,
                    angle,
                } => {
                    let gate = rotation_matrix(*axis, *angle)?;
                    state.apply_single_qubit(*target, &gate)?;
                }
                ControlEvent::SetSwitch { pair, factor } => mask.set(pair[0], pair[1], *factor)?,
                ControlEvent::Measure { kind, targets } => {
                    let eps = options.readout_error;
                    let outcome = match kind {
                        MeasurementKind::Single => {
                            measure_single(&state, targets[0], eps, &mut rng)?
                        }
                        MeasurementKind::Mask => measure_mask(&state, targets, eps, &mut rng)?,
                        MeasurementKind::Difference => {
                            measure_difference(&state, targets[0], targets[1], &mut rng)?
                        }
                    };
                    state = outcome.post_state.clone();
                    log.push(outcome);
                }
            }
        }
        Ok(RunResult {
            final_state: state,
            measurement_log: log,
            total_duration: total,
            segment_count: segments,
            final_mask: mask,
        })
    }

    /// Dense unitary of a measurement-free program that does not start from
    /// `init`.
    pub fn program_unitary(&self, program: &Program<T>) -> Result<DMatrix<C<T>>> {
        self.check(program)?;
        let n = self.spec.n();
        let dim = 1usize << n;
        if let Some(e) = program
            .events
            .iter()
            .find(|e| e.is_measurement() || matches!(e, ControlEvent::InitializePumped {}))
        {
            return Err(Error::Unsupported(format!(
                "program is not a unitary map (contains {e:?})"
            )));
        }
        let mut u = DMatrix::<C<T>>::identity(dim, dim);
        let mut mask = SwitchMask::all_on(n);
        for event in &program.events {
            match event {
                ControlEvent::Delay { seconds } => {
                    let p = self.idle_propagator(&mask, *seconds)?;
                    for mut col in u.column_iter_mut() {
                        p.apply_in_place(col.as_mut_slice())?;
                    }
                }
                ControlEvent::Pulse {
                    target,
                    axis,
                    angle,
                } => {
                    let gate = rotation_matrix(*axis, *angle)?;
                    for mut col in u.column_iter_mut() {
                        apply_single_qubit_slice(col.as_mut_slice(), n, *target, &gate);
                    }
                }
                ControlEvent::SetSwitch { pair, factor } => mask.set(pair[0], pair[1], *factor)?,
                ControlEvent::InitializePumped {} | ControlEvent::Measure { .. } => unreachable!(),
            }
        }
        Ok(u)
    }
}

/// Executes `program` on `spec` from the pumped state.
pub fn run<T: Real>(
    program: &Program<T>,
    spec: &ChainSpec<T>,
    options: &RunOptions<T>,
) -> Result<RunResult<T>> {
    Interpreter::new(spec).run(program, options)
}

/// The propagator a delay of `duration` applies under `mask`.
pub fn idle_unitary<T: Real>(
    spec: &ChainSpec<T>,
    mask: &SwitchMask<T>,
    duration: T,
) -> Result<Propagator<T>> {
    if mask.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: mask.n(),
        });
    }
    Ok((*Interpreter::new(spec).idle_propagator(mask, duration)?).clone())
}

/// Dense unitary of a measurement-free program, without `init`.
pub fn program_unitary<T: Real>(
    program: &Program<T>,
    spec: &ChainSpec<T>,
) -> Result<DMatrix<C<T>>> {
    Interpreter::new(spec).program_unitary(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingCutoff;
    use crate::physics::{CouplingParams, NucleusSpec};
    use crate::scalar::{cis, C};

    fn pair(gamma: f64) -> ChainSpec<f64> {
        ChainSpec::uniform_line(
            NucleusSpec::new("P", 15, gamma),
            2,
            10.0,
            6.58,
            CouplingParams::new(1.0e10, 1.0).unwrap(),
            CouplingCutoff::AllPairs,
        )
        .unwrap()
    }

    #[test]
    fn init_only_program() {
        let spec = pair(1.0e8);
        let p = Program::with_events("init", vec![ControlEvent::InitializePumped {}]);
        let r = run(&p, &spec, &RunOptions::seeded(0)).unwrap();
        assert_eq!(r.final_state, StateVector::pumped(2).unwrap());
        assert_eq!(r.total_duration, 0.0);
        assert_eq!(r.segment_count, 0);
    }

    #[test]
    fn validation_failure_aborts() {
        let spec = pair(1.0e8);
        let p = Program::with_events("bad", vec![ControlEvent::x(4, 1.0)]);
        assert!(matches!(
            run(&p, &spec, &RunOptions::seeded(0)),
            Err(Error::Validation(d)) if d.len() == 1
        ));
    }

    #[test]
    fn flip_flop_transfer_of_flipped_spin() {
        let spec = pair(0.0);
        let j = spec.pair_coupling(0, 1).unwrap();
        let p = Program::with_events(
            "transfer",
            vec![
                ControlEvent::InitializePumped {},
                ControlEvent::x(0, std::f64::consts::PI),
                ControlEvent::delay(std::f64::consts::PI / (2.0 * j)),
            ],
        );
        let r = run(&p, &spec, &RunOptions::seeded(0)).unwrap();
        // -i|10⟩ after the pulse, then |10⟩ → i|01⟩: net |01⟩ up to phase.
        let target = StateVector::basis(2, 0b01).unwrap();
        assert!((r.final_state.overlap(&target).unwrap() - 1.0).abs() < 1e-12);
        let amp = r.final_state.amplitudes()[1];
        assert!((amp - C::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn switched_off_pair_keeps_excitation() {
        let spec = pair(1.0e8);
        let p = Program::with_events(
            "off",
            vec![
                ControlEvent::InitializePumped {},
                ControlEvent::switch(0, 1, 0.0),
                ControlEvent::x(0, std::f64::consts::PI),
                ControlEvent::delay(3.3e-9),
            ],
        );
        let r = run(&p, &spec, &RunOptions::seeded(0)).unwrap();
        let target = StateVector::basis(2, 0b10).unwrap();
        assert!((r.final_state.overlap(&target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn idle_unitary_zero_and_zeeman_only() {
        let spec = pair(1.0e8);
        let u = idle_unitary(&spec, &SwitchMask::all_on(2), 0.0).unwrap();
        assert_eq!(u.to_dense(), DMatrix::identity(4, 4));
        let t = 2.1e-9;
        let u = idle_unitary(&spec, &SwitchMask::all_off(2), t)
            .unwrap()
            .to_dense();
        let w = spec.larmor(0);
        // diag over |00⟩,|01⟩,|10⟩,|11⟩ of exp(+i·w·t·(z0 + z1)).
        let expected = [2.0, 0.0, 0.0, -2.0];
        for (k, &zsum) in expected.iter().enumerate() {
            assert!((u[(k, k)] - cis(w * t * zsum)).norm() < 1e-12);
        }
        assert!(u
            .iter()
            .enumerate()
            .all(|(idx, z)| idx % 5 == 0 || z.norm() == 0.0));
    }

    #[test]
    fn cache_reuses_eigensystems_across_delays() {
        let spec = pair(1.0e8);
        let interp = Interpreter::new(&spec);
        let p = Program::with_events(
            "cache",
            vec![
                ControlEvent::delay(1e-10),
                ControlEvent::delay(2e-10),
                ControlEvent::switch(0, 1, 0.5),
                ControlEvent::delay(1e-10),
                ControlEvent::switch(0, 1, 1.0),
                ControlEvent::delay(3e-10),
            ],
        );
        interp.run(&p, &RunOptions::seeded(0)).unwrap();
        assert_eq!(interp.cache().eigensystem_count(), 2);
    }

    #[test]
    fn program_unitary_refuses_measurements() {
        let spec = pair(1.0e8);
        let p = Program::with_events("m", vec![ControlEvent::measure_single(0)]);
        assert!(program_unitary(&p, &spec).is_err());
    }
}

//! Readout models: projective σ_z on one spin (conducting strip), on a group
//! of spins (mask of strips), and of the difference `(σ_z⁽ⁱ⁾ − σ_z⁽ʲ⁾)/2` of
//! two spins.
//!
//! Reported single-spin values pass through a symmetric classical bit flip
//! with probability `readout_error`; the post-measurement state always
//! reflects the true projection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::qubit_bit;
use crate::scalar::Real;

use super::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    Single,
    Mask,
    Difference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<T> {
    pub kind: MeasurementKind,
    pub targets: Vec<usize>,
    /// Reported eigenvalues, one per target (single/mask) or one in
    /// `{-1, 0, +1}` (difference).
    pub values: Vec<i8>,
    pub post_state: StateVector<T>,
    /// Born probability of the projection that actually happened.
    pub probability: T,
}

fn check_readout_error<T: Real>(eps: T) -> Result<()> {
    if eps >= T::zero() && eps < T::lit(0.5) {
        Ok(())
    } else {
        Err(domain(format!("readout error {eps} outside [0, 0.5)")))
    }
}

/// Samples an index from unnormalized weights using one uniform draw.
fn sample_index<T: Real>(weights: &[T], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().map(|w| w.as_f64()).sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, w) in weights.iter().enumerate() {
        let w = w.as_f64();
        if w > 0.0 {
            last_nonzero = k;
            acc += w;
            if u < acc {
                return k;
            }
        }
    }
    last_nonzero
}

fn report<T: Real>(value: i8, eps: T, rng: &mut impl Rng) -> i8 {
    if rng.random_bool(eps.as_f64()) {
        -value
    } else {
        value
    }
}

fn eigenvalue(bit_set: bool) -> i8 {
    if bit_set {
        -1
    } else {
        1
    }
}

pub fn measure_single<T: Real>(
    state: &StateVector<T>,
    target: usize,
    readout_error: T,
    rng: &mut impl Rng,
) -> Result<MeasurementOutcome<T>> {
    let mut outcome = measure_mask(state, &[target], readout_error, rng)?;
    outcome.kind = MeasurementKind::Single;
    Ok(outcome)
}

/// Simultaneous σ_z readout of `targets`; values are reported in the order
/// the targets are given.
pub fn measure_mask<T: Real>(
    state: &StateVector<T>,
    targets: &[usize],
    readout_error: T,
    rng: &mut impl Rng,
) -> Result<MeasurementOutcome<T>> {
    check_readout_error(readout_error)?;
    if targets.is_empty() {
        return Err(domain("mask measurement needs at least one target"));
    }
    let n = state.n();
    for (k, &t) in targets.iter().enumerate() {
        state.check_target(t)?;
        if targets[..k].contains(&t) {
            return Err(domain(format!("qubit {t} listed twice in mask")));
        }
    }
    let bits: Vec<usize> = targets.iter().map(|&t| qubit_bit(n, t)).collect();
    let pattern_of = |k: usize| {
        bits.iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(k & b != 0))
    };

    let mut weights = vec![T::zero(); 1 << targets.len()];
    for (k, a) in state.amplitudes().iter().enumerate() {
        weights[pattern_of(k)] += a.norm_sqr();
    }
    let chosen = sample_index(&weights, rng);
    let mut post = state.clone();
    let probability = post.project(|k| pattern_of(k) == chosen);

    let width = targets.len();
    let values = (0..width)
        .map(|pos| {
            let bit_set = (chosen >> (width - 1 - pos)) & 1 == 1;
            report(eigenvalue(bit_set), readout_error, rng)
        })
        .collect();
    Ok(MeasurementOutcome {
        kind: MeasurementKind::Mask,
        targets: targets.to_vec(),
        values,
        post_state: post,
        probability,
    })
}

/// Projective measurement of `(σ_z⁽ⁱ⁾ − σ_z⁽ʲ⁾)/2`. The 0 outcome projects
/// onto the whole degenerate subspace of equal spins.
pub fn measure_difference<T: Real>(
    state: &StateVector<T>,
    i: usize,
    j: usize,
    rng: &mut impl Rng,
) -> Result<MeasurementOutcome<T>> {
    state.check_target(i)?;
    state.check_target(j)?;
    if i == j {
        return Err(Error::Domain(
            "difference measurement needs two distinct spins".into(),
        ));
    }
    let n = state.n();
    let (bi, bj) = (qubit_bit(n, i), qubit_bit(n, j));
    let value_of = |k: usize| -> i8 {
        // σ_z eigenvalue is +1 for a clear bit.
        let zi = eigenvalue(k & bi != 0);
        let zj = eigenvalue(k & bj != 0);
        (zi - zj) / 2
    };
    let mut weights = [T::zero(); 3];
    for (k, a) in state.amplitudes().iter().enumerate() {
        weights[(value_of(k) + 1) as usize] += a.norm_sqr();
    }
    let value = sample_index(&weights, rng) as i8 - 1;
    let mut post = state.clone();
    let probability = post.project(|k| value_of(k) == value);
    Ok(MeasurementOutcome {
        kind: MeasurementKind::Difference,
        targets: vec![i, j],
        values: vec![value],
        post_state: post,
        probability,
    })
}

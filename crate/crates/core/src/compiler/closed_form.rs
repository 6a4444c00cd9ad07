use serde::{Deserialize, Serialize};

use crate::control::{program_unitary, ControlEvent, Program};
use crate::error::{domain, Error, Result};
use crate::model::ChainSpec;
use crate::scalar::Real;

use super::target::{fidelity, TargetUnitary};

/// Outcome of compiling a target into a program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct SynthesisResult<T: Real> {
    pub program: Program<T>,
    /// Recomputed from a fresh simulation of `program`.
    pub fidelity: T,
    /// Objective evaluations spent.
    pub iterations: usize,
    pub converged: bool,
    /// Best fidelity seen by the optimizer, before recomputation.
    pub optimizer_fidelity: T,
}

/// Infidelity accepted from closed-form constructions.
pub fn closed_form_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::lit(10.0) * T::structural_tolerance())
}

fn wrap_angle<T: Real>(angle: T) -> T {
    // Spin-1/2 rotations are 4π periodic.
    let period = T::lit(4.0) * T::pi();
    angle - (angle / period).floor() * period
}

/// `R_z(2·ω_q·elapsed)` on each listed spin, undoing the lab-frame Zeeman
/// phase accumulated over `elapsed` seconds. Zero angles are skipped.
pub fn zeeman_corrections<T: Real>(
    spec: &ChainSpec<T>,
    qubits: impl IntoIterator<Item = usize>,
    elapsed: T,
) -> Vec<ControlEvent<T>> {
    qubits
        .into_iter()
        .filter_map(|q| {
            let angle = wrap_angle(T::lit(2.0) * spec.larmor(q) * elapsed);
            (angle != T::zero()).then(|| ControlEvent::z(q, angle))
        })
        .collect()
}

fn coupled_pairs<T: Real>(spec: &ChainSpec<T>) -> Result<Vec<(usize, usize, T)>> {
    let n = spec.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let jij = spec.pair_coupling(i, j)?;
            if jij != T::zero() {
                out.push((i, j, jij));
            }
        }
    }
    Ok(out)
}

fn ordered(pair: (usize, usize)) -> (usize, usize) {
    (pair.0.min(pair.1), pair.0.max(pair.1))
}

/// iSWAP on `pair` from one flip-flop delay of `π/(2J)` with every other
/// coupled pair switched off, followed by Zeeman corrections on all spins.
pub fn calibrate_iswap<T: Real>(
    spec: &ChainSpec<T>,
    pair: (usize, usize),
) -> Result<SynthesisResult<T>> {
    let j = spec.pair_coupling(pair.0, pair.1)?;
    if j == T::zero() {
        return Err(Error::NotSynthesizable(format!(
            "pair ({}, {}) has no exchange coupling",
            pair.0, pair.1
        )));
    }
    let target_pair = ordered(pair);
    let others: Vec<_> = coupled_pairs(spec)?
        .into_iter()
        .filter(|&(a, b, _)| (a, b) != target_pair)
        .collect();
    let t = T::frac_pi_2() / j;

    let mut program = Program::new(format!("iswap({},{})", pair.0, pair.1));
    program.extend(
        others
            .iter()
            .map(|&(a, b, _)| ControlEvent::switch(a, b, T::zero())),
    );
    program.push(ControlEvent::delay(t));
    program.extend(
        others
            .iter()
            .map(|&(a, b, _)| ControlEvent::switch(a, b, T::one())),
    );
    program.extend(zeeman_corrections(spec, 0..spec.n(), t));

    let target = TargetUnitary::iswap(pair.0, pair.1)?.embed(spec.n())?;
    let f = fidelity(&program_unitary(&program, spec)?, &target)?;
    Ok(SynthesisResult {
        program,
        fidelity: f,
        iterations: 1,
        converged: T::one() - f <= closed_form_tolerance(),
        optimizer_fidelity: f,
    })
}

/// Spin echo `[τ, R_z(π) on pair.0, τ, R_z(-π) on pair.0]` plus Zeeman
/// corrections. The flip-flop cancels exactly for equal Larmor frequencies.
pub fn refocus_pair<T: Real>(
    spec: &ChainSpec<T>,
    pair: (usize, usize),
    tau: T,
) -> Result<Program<T>> {
    refocus_pair_on(spec, pair, tau, pair.0)
}

/// [`refocus_pair`] with the echo pulses on `flipped`, one spin of the pair.
pub fn refocus_pair_on<T: Real>(
    spec: &ChainSpec<T>,
    pair: (usize, usize),
    tau: T,
    flipped: usize,
) -> Result<Program<T>> {
    spec.pair_coupling(pair.0, pair.1)?;
    if flipped != pair.0 && flipped != pair.1 {
        return Err(domain(format!(
            "spin {flipped} is not part of pair ({}, {})",
            pair.0, pair.1
        )));
    }
    if !(tau.is_finite() && tau > T::zero()) {
        return Err(domain(format!(
            "refocusing interval must be > 0, got {tau}"
        )));
    }
    let mut program = Program::with_events(
        format!("refocus({},{})", pair.0, pair.1),
        vec![
            ControlEvent::delay(tau),
            ControlEvent::z(flipped, T::pi()),
            ControlEvent::delay(tau),
            ControlEvent::z(flipped, -T::pi()),
        ],
    );
    program.extend(zeeman_corrections(spec, 0..spec.n(), tau + tau));
    Ok(program)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdleIdentity<T: Real> {
    pub program: Program<T>,
    /// Couplings this sequence does not cancel.
    pub warnings: Vec<String>,
}

/// Identity over `tau` seconds on the whole chain by echoing the even-index
/// spins. Cancels exactly the couplings between spins of opposite index
/// parity when all Larmor frequencies match.
pub fn idle_identity<T: Real>(spec: &ChainSpec<T>, tau: T) -> Result<IdleIdentity<T>> {
    if !(tau.is_finite() && tau > T::zero()) {
        return Err(domain(format!("idle duration must be > 0, got {tau}")));
    }
    let n = spec.n();
    let half = tau / T::lit(2.0);
    let evens: Vec<usize> = (0..n).step_by(2).collect();
    let mut program = Program::new("idle");
    program.push(ControlEvent::delay(half));
    program.extend(evens.iter().map(|&q| ControlEvent::z(q, T::pi())));
    program.push(ControlEvent::delay(half));
    program.extend(evens.iter().map(|&q| ControlEvent::z(q, -T::pi())));
    program.extend(zeeman_corrections(spec, 0..n, tau));

    let mut warnings: Vec<String> = coupled_pairs(spec)?
        .into_iter()
        .filter(|&(i, j, _)| (i + j) % 2 == 0)
        .map(|(i, j, jij)| {
            format!("pair ({i}, {j}) with J = {jij} rad/s shares echo parity and is not refocused")
        })
        .collect();
    let w = spec.larmor_frequencies();
    if w.iter().any(|&x| x != w[0]) {
        warnings.push("Larmor frequencies differ; refocusing is approximate".into());
    }
    Ok(IdleIdentity { program, warnings })
}

use crate::error::{domain, Error, Result};
use crate::model::{qubit_bit, Operator};
use crate::scalar::{c, c_real, Real, C};

use super::MAX_QUBITS;

/// Pure state of an `n`-spin register: `2ⁿ` amplitudes, qubit 0 as the most
/// significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amplitudes: Vec<C<T>>,
}

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount { n, max: MAX_QUBITS })
    }
}

impl<T: Real> StateVector<T> {
    /// All spins along the field, `|0…0⟩`, as left by optical pumping.
    pub fn pumped(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index + 1,
            });
        }
        let mut amplitudes = vec![C::<T>::default(); dim];
        amplitudes[index] = c_real(T::one());
        Ok(Self { n, amplitudes })
    }

    /// Wraps and normalizes arbitrary amplitudes.
    pub fn from_amplitudes(amplitudes: Vec<C<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(domain(format!(
                "state dimension {dim} is not a power of two"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_qubit_count(n)?;
        let mut state = Self { n, amplitudes };
        let norm = state.norm();
        if !(norm.is_finite() && norm > T::zero()) {
            return Err(domain("state has zero or non-finite norm"));
        }
        state.scale_by(T::one() / norm);
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
            .sqrt()
    }

    pub(crate) fn scale_by(&mut self, factor: T) {
        for a in &mut self.amplitudes {
            *a = a.scale(factor);
        }
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨ψ|φ⟩`
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(C::<T>::default(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|⟨ψ|φ⟩|²`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub(crate) fn check_target(&self, target: usize) -> Result<()> {
        if target < self.n {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                index: target,
                n: self.n,
            })
        }
    }

    /// Expectation of a product of `σ_z` over `qubits` (empty product = 1).
    pub fn expectation_z_product(&self, qubits: &[usize]) -> Result<T> {
        let mut mask = 0usize;
        for &q in qubits {
            self.check_target(q)?;
            mask ^= qubit_bit(self.n, q);
        }
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, a)| {
                if (k & mask).count_ones().is_multiple_of(2) {
                    acc + a.norm_sqr()
                } else {
                    acc - a.norm_sqr()
                }
            }))
    }

    pub fn expectation_z(&self, qubit: usize) -> Result<T> {
        self.expectation_z_product(&[qubit])
    }

    /// `⟨Σ_j σ_z⁽ʲ⁾⟩`
    pub fn expectation_total_z(&self) -> T {
        let n = T::lit(self.n as f64);
        self.amplitudes
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, a)| {
                let ones = T::lit(k.count_ones() as f64);
                acc + a.norm_sqr() * (n - ones - ones)
            })
    }

    /// Applies a 2×2 matrix to one spin in place.
    pub fn apply_single_qubit(&mut self, target: usize, gate: &[[C<T>; 2]; 2]) -> Result<()> {
        self.check_target(target)?;
        apply_single_qubit_slice(&mut self.amplitudes, self.n, target, gate);
        Ok(())
    }

    pub fn apply_operator(&mut self, op: &Operator<T>) -> Result<()> {
        self.amplitudes = op.apply(&self.amplitudes)?;
        Ok(())
    }

    /// Sets all amplitudes whose basis index fails `keep` to zero and
    /// renormalizes. Returns the kept probability.
    pub(crate) fn project(&mut self, keep: impl Fn(usize) -> bool) -> T {
        let mut p = T::zero();
        for (k, a) in self.amplitudes.iter_mut().enumerate() {
            if keep(k) {
                p += a.norm_sqr();
            } else {
                *a = C::<T>::default();
            }
        }
        if p > T::zero() {
            self.scale_by(T::one() / p.sqrt());
        }
        p
    }
}

pub(crate) fn apply_single_qubit_slice<T: Real>(
    amps: &mut [C<T>],
    n: usize,
    target: usize,
    gate: &[[C<T>; 2]; 2],
) {
    let bit = qubit_bit(n, target);
    for k in 0..amps.len() {
        if k & bit == 0 {
            let (a0, a1) = (amps[k], amps[k | bit]);
            amps[k] = gate[0][0] * a0 + gate[0][1] * a1;
            amps[k | bit] = gate[1][0] * a0 + gate[1][1] * a1;
        }
    }
}

/// `exp(-i·angle·(axis·σ)/2)`; `axis` must be a unit vector.
pub fn rotation_matrix<T: Real>(axis: [T; 3], angle: T) -> Result<[[C<T>; 2]; 2]> {
    let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let tol = T::lit(1e-9).max(T::structural_tolerance());
    if !((len - T::one()).abs() <= tol) {
        return Err(domain(format!(
            "rotation axis has length {len}, expected 1"
        )));
    }
    if !angle.is_finite() {
        return Err(domain("rotation angle is not finite"));
    }
    let half = angle / T::lit(2.0);
    let (co, s) = (half.cos(), half.sin());
    let [x, y, z] = axis;
    Ok([
        [c(co, -s * z), c(-s * y, -s * x)],
        [c(s * y, -s * x), c(co, s * z)],
    ])
}

/// Instantaneous rotation of one spin by `angle` about `axis`.
pub fn apply_pulse<T: Real>(
    state: &StateVector<T>,
    target: usize,
    axis: [T; 3],
    angle: T,
) -> Result<StateVector<T>> {
    let gate = rotation_matrix(axis, angle)?;
    let mut out = state.clone();
    out.apply_single_qubit(target, &gate)?;
    Ok(out)
}

pub fn initialize_pumped<T: Real>(n: usize) -> Result<StateVector<T>> {
    StateVector::pumped(n)
}

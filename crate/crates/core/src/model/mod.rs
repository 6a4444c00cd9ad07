//! The physical instance (nuclei, geometry, field, switch mask) and the
//! assembly of its spin Hamiltonian
//!
//! `M/ħ = -Σ_j ω_j σ_z⁽ʲ⁾ - Σ_{i<j} s_ij·J_ij·(σ₊⁽ⁱ⁾σ₋⁽ʲ⁾ + σ₋⁽ⁱ⁾σ₊⁽ʲ⁾)`
//!
//! in rad/s, where `s_ij ∈ [0, 1]` is the switch factor of the pair.

mod operator;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

pub(crate) use operator::qubit_bit;
pub use operator::{pauli_operator, total_z, HamiltonianMatrix, Operator, PauliKind};

use crate::engine::MAX_QUBITS;
use crate::error::{domain, Error, Result};
use crate::physics::{coupling_strength, larmor_frequency, CouplingParams, NucleusSpec};
use crate::scalar::{c_real, Real};

/// Which pairs carry an exchange term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingCutoff<T> {
    AllPairs,
    /// Only index-adjacent pairs `(i, i+1)` of the chain.
    NearestNeighbor,
    /// Pairs whose separation is at most this many nanometers.
    Radius(T),
}

/// A chain of nuclei in the plane, in a perpendicular field.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec<T> {
    pub nuclei: Vec<NucleusSpec<T>>,
    /// Planar positions in nm.
    pub positions: Vec<[T; 2]>,
    /// Applied field in tesla.
    pub field: T,
    pub coupling: CouplingParams<T>,
    pub cutoff: CouplingCutoff<T>,
    /// Multiplies every pair coupling; 1 for the nominal device. Replica
    /// disorder draws this per replica.
    pub coupling_scale: T,
}

impl<T: Real> ChainSpec<T> {
    pub fn new(
        nuclei: Vec<NucleusSpec<T>>,
        positions: Vec<[T; 2]>,
        field: T,
        coupling: CouplingParams<T>,
        cutoff: CouplingCutoff<T>,
    ) -> Result<Self> {
        let spec = Self {
            nuclei,
            positions,
            field,
            coupling,
            cutoff,
            coupling_scale: T::one(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `n` copies of `nucleus` on the x axis with uniform `spacing` nm.
    pub fn uniform_line(
        nucleus: NucleusSpec<T>,
        n: usize,
        spacing: T,
        field: T,
        coupling: CouplingParams<T>,
        cutoff: CouplingCutoff<T>,
    ) -> Result<Self> {
        let nuclei = (0..n)
            .map(|k| NucleusSpec {
                label: format!("{}{k}", nucleus.label),
                ..nucleus.clone()
            })
            .collect();
        let positions = (0..n)
            .map(|k| [spacing * T::lit(k as f64), T::zero()])
            .collect();
        Self::new(nuclei, positions, field, coupling, cutoff)
    }

    pub fn n(&self) -> usize {
        self.nuclei.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nuclei.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount { n, max: MAX_QUBITS });
        }
        if self.positions.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.positions.len(),
            });
        }
        if !(self.field.is_finite() && self.field > T::zero()) {
            return Err(domain(format!(
                "applied field must be positive, got {}",
                self.field
            )));
        }
        if !(self.coupling_scale.is_finite() && self.coupling_scale >= T::zero()) {
            return Err(domain("coupling scale must be non-negative"));
        }
        self.coupling.validate()?;
        if let CouplingCutoff::Radius(r) = self.cutoff {
            if !(r.is_finite() && r > T::zero()) {
                return Err(domain(format!("cutoff radius must be positive, got {r}")));
            }
        }
        for nucleus in &self.nuclei {
            nucleus.validate()?;
        }
        for (k, p) in self.positions.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(domain(format!("position of spin {k} is not finite")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !(self.separation(i, j) > T::zero()) {
                    return Err(domain(format!("spins {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    /// Distance between spins `i` and `j` in nm.
    pub fn separation(&self, i: usize, j: usize) -> T {
        let dx = self.positions[i][0] - self.positions[j][0];
        let dy = self.positions[i][1] - self.positions[j][1];
        (dx * dx + dy * dy).sqrt()
    }

    pub fn larmor(&self, j: usize) -> T {
        larmor_frequency(&self.nuclei[j], self.field)
    }

    pub fn larmor_frequencies(&self) -> Vec<T> {
        (0..self.n()).map(|j| self.larmor(j)).collect()
    }

    pub fn pair_included(&self, i: usize, j: usize) -> bool {
        match self.cutoff {
            CouplingCutoff::AllPairs => true,
            CouplingCutoff::NearestNeighbor => i.abs_diff(j) == 1,
            CouplingCutoff::Radius(r) => self.separation(i, j) <= r,
        }
    }

    /// Unmasked coupling `J_ij` in rad/s; zero for pairs outside the cutoff.
    pub fn pair_coupling(&self, i: usize, j: usize) -> Result<T> {
        let n = self.n();
        for q in [i, j] {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        if i == j {
            return Err(domain("a pair needs two distinct spins"));
        }
        if !self.pair_included(i, j) {
            return Ok(T::zero());
        }
        let j_ij = coupling_strength(
            &self.coupling,
            self.nuclei[i].z(),
            self.nuclei[j].z(),
            self.field,
            self.separation(i, j),
        )?;
        Ok(self.coupling_scale * j_ij)
    }
}

/// Per-pair switch factors in `[0, 1]`; 1 leaves the exchange fully on.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchMask<T> {
    n: usize,
    factors: Vec<T>,
}

impl<T: Real> SwitchMask<T> {
    pub fn all_on(n: usize) -> Self {
        Self::uniform(n, T::one())
    }

    pub fn all_off(n: usize) -> Self {
        Self::uniform(n, T::zero())
    }

    pub fn uniform(n: usize, factor: T) -> Self {
        Self {
            n,
            factors: vec![factor; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> Result<usize> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if b >= self.n {
            return Err(Error::QubitOutOfRange {
                index: b,
                n: self.n,
            });
        }
        if a == b {
            return Err(domain("switch mask has no diagonal entries"));
        }
        Ok(a * (2 * self.n - a - 1) / 2 + (b - a - 1))
    }

    pub fn get(&self, i: usize, j: usize) -> Result<T> {
        Ok(self.factors[self.index(i, j)?])
    }

    pub fn set(&mut self, i: usize, j: usize, factor: T) -> Result<()> {
        if !(factor >= T::zero() && factor <= T::one()) {
            return Err(domain(format!("switch factor {factor} outside [0, 1]")));
        }
        let k = self.index(i, j)?;
        self.factors[k] = factor;
        Ok(())
    }

    pub fn is_all_on(&self) -> bool {
        self.factors.iter().all(|&f| f == T::one())
    }

    /// Stable key over the exact factor bit patterns, used to cache
    /// eigendecompositions per mask.
    pub fn hash_key(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n.hash(&mut h);
        for f in &self.factors {
            f.as_f64().to_bits().hash(&mut h);
        }
        h.finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingEntry<T> {
    pub pair: (usize, usize),
    /// rad/s
    pub strength: T,
}

/// All pairs passing the cutoff with their coupling, strongest first.
pub fn coupling_table<T: Real>(spec: &ChainSpec<T>) -> Result<Vec<CouplingEntry<T>>> {
    let n = spec.n();
    let mut table = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if spec.pair_included(i, j) {
                table.push(CouplingEntry {
                    pair: (i, j),
                    strength: spec.pair_coupling(i, j)?,
                });
            }
        }
    }
    table.sort_by(|a, b| {
        b.strength
            .partial_cmp(&a.strength)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.pair.cmp(&b.pair))
    });
    Ok(table)
}

/// Assembles the Zeeman plus masked flip-flop Hamiltonian of `spec`.
pub fn build_hamiltonian<T: Real>(
    spec: &ChainSpec<T>,
    mask: &SwitchMask<T>,
) -> Result<HamiltonianMatrix<T>> {
    spec.validate()?;
    let n = spec.n();
    if mask.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mask.n(),
        });
    }
    let dim = 1usize << n;
    let omegas = spec.larmor_frequencies();

    let mut entries = Vec::with_capacity(dim * (1 + n * (n - 1) / 4));
    for k in 0..dim {
        let mut diag = T::zero();
        for (q, &w) in omegas.iter().enumerate() {
            if k & qubit_bit(n, q) == 0 {
                diag -= w;
            } else {
                diag += w;
            }
        }
        entries.push((k, k, c_real(diag)));
    }

    for i in 0..n {
        for j in i + 1..n {
            let strength = spec.pair_coupling(i, j)? * mask.get(i, j)?;
            if strength == T::zero() {
                continue;
            }
            let (bi, bj) = (qubit_bit(n, i), qubit_bit(n, j));
            let amp = c_real(-strength);
            for k in 0..dim {
                // σ₊σ₋ + σ₋σ₊ swaps |..0..1..⟩ and |..1..0..⟩ with unit weight.
                if (k & bi == 0) != (k & bj == 0) {
                    entries.push((k ^ (bi | bj), k, amp));
                }
            }
        }
    }
    entries.sort_unstable_by_key(|&(r, col, _)| (r, col));
    Ok(Operator::from_sorted(dim, entries))
}

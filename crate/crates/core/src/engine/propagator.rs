//! Segment propagators `exp(-i·M·dt)` from a Hermitian eigendecomposition.
//!
//! The Hamiltonian is first split into the connected components of its
//! off-diagonal sparsity graph. For the Zeeman plus flip-flop model these are
//! (subsets of) the fixed-magnetization sectors, so a 12-spin chain never
//! diagonalizes anything larger than 924×924. Purely real blocks take the
//! real symmetric solver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::model::HamiltonianMatrix;
use crate::scalar::{c, c_real, cis, modulus, Real, C};

use super::StateVector;

#[derive(Debug, Clone)]
enum Eigenvectors<T: Real> {
    Real(DMatrix<T>),
    Complex(DMatrix<C<T>>),
}

#[derive(Debug, Clone)]
struct EigenBlock<T: Real> {
    indices: Vec<usize>,
    values: Vec<T>,
    vectors: Eigenvectors<T>,
}

/// Block eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Eigensystem<T: Real> {
    dim: usize,
    blocks: Vec<EigenBlock<T>>,
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl<T: Real> Eigensystem<T> {
    pub fn new(h: &HamiltonianMatrix<T>) -> Result<Self> {
        let dim = h.dim();
        let scale = h.max_abs();
        let deviation = h.hermiticity_deviation();
        if !(deviation <= T::structural_tolerance() * scale) {
            return Err(Error::NotHermitian {
                deviation: deviation.as_f64(),
            });
        }

        let zero = C::<T>::default();
        let mut sets = DisjointSet::new(dim);
        for &(r, col, v) in h.entries() {
            if r != col && v != zero {
                sets.union(r, col);
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for k in 0..dim {
            let root = sets.find(k);
            members[root].push(k);
        }
        let mut local = vec![0usize; dim];
        let mut blocks = Vec::new();
        for indices in members.into_iter().filter(|m| !m.is_empty()) {
            for (pos, &k) in indices.iter().enumerate() {
                local[k] = pos;
            }
            blocks.push(Self::decompose_block(h, indices, &local));
        }
        Ok(Self { dim, blocks })
    }

    fn decompose_block(
        h: &HamiltonianMatrix<T>,
        indices: Vec<usize>,
        local: &[usize],
    ) -> EigenBlock<T> {
        let m = indices.len();
        if m == 1 {
            let k = indices[0];
            return EigenBlock {
                values: vec![h.get(k, k).re],
                vectors: Eigenvectors::Real(DMatrix::from_element(1, 1, T::one())),
                indices,
            };
        }
        let in_block = |r: usize| local[r] < m && indices[local[r]] == r;
        let mut dense = DMatrix::from_element(m, m, C::<T>::default());
        let mut real = true;
        for &k in &indices {
            let row = local[k];
            // Entries of row k that fall in this block.
            for &(_, col, v) in row_entries(h, k) {
                if in_block(col) {
                    dense[(row, local[col])] = v;
                    real &= v.im == T::zero();
                }
            }
        }
        if real {
            let sym = dense.map(|z| z.re);
            let eig = SymmetricEigen::new(sym);
            EigenBlock {
                indices,
                values: eig.eigenvalues.iter().copied().collect(),
                vectors: Eigenvectors::Real(eig.eigenvectors),
            }
        } else {
            let eig = SymmetricEigen::new(dense);
            EigenBlock {
                indices,
                values: eig.eigenvalues.iter().copied().collect(),
                vectors: Eigenvectors::Complex(eig.eigenvectors),
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sizes of the independent blocks.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.indices.len()).collect()
    }

    /// All eigenvalues, block by block.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.blocks
            .iter()
            .flat_map(|b| b.values.iter().copied())
            .collect()
    }

    /// `exp(-i·M·dt)`.
    pub fn propagator(&self, dt: T) -> Result<Propagator<T>> {
        check_duration(dt)?;
        if dt == T::zero() {
            return Ok(Propagator::identity(self.dim));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| UnitaryBlock {
                indices: b.indices.clone(),
                unitary: block_exponential(b, dt),
            })
            .collect();
        Ok(Propagator {
            dim: self.dim,
            blocks,
            duration: dt,
            mask_hash: None,
        })
    }
}

fn row_entries<T: Real>(h: &HamiltonianMatrix<T>, row: usize) -> &[(usize, usize, C<T>)] {
    let e = h.entries();
    let lo = e.partition_point(|&(r, _, _)| r < row);
    let hi = e.partition_point(|&(r, _, _)| r <= row);
    &e[lo..hi]
}

fn block_exponential<T: Real>(block: &EigenBlock<T>, dt: T) -> DMatrix<C<T>> {
    let m = block.indices.len();
    match &block.vectors {
        Eigenvectors::Real(v) => {
            if m == 1 {
                return DMatrix::from_element(1, 1, cis(-block.values[0] * dt));
            }
            // V·diag(cos)·Vᵀ - i·V·diag(sin)·Vᵀ with real products.
            let mut vc = v.clone();
            let mut vs = v.clone();
            for (j, &lambda) in block.values.iter().enumerate() {
                let phase = lambda * dt;
                vc.column_mut(j).scale_mut(phase.cos());
                vs.column_mut(j).scale_mut(phase.sin());
            }
            let vt = v.transpose();
            let re = vc * &vt;
            let im = vs * &vt;
            DMatrix::from_fn(m, m, |r, col| c(re[(r, col)], -im[(r, col)]))
        }
        Eigenvectors::Complex(v) => {
            let mut w = v.clone();
            for (j, &lambda) in block.values.iter().enumerate() {
                let phase = cis(-lambda * dt);
                for r in 0..m {
                    w[(r, j)] *= phase;
                }
            }
            w * v.adjoint()
        }
    }
}

fn check_duration<T: Real>(dt: T) -> Result<()> {
    if dt.is_finite() && dt >= T::zero() {
        Ok(())
    } else {
        Err(domain(format!(
            "segment duration must be finite and >= 0, got {dt}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct UnitaryBlock<T: Real> {
    indices: Vec<usize>,
    unitary: DMatrix<C<T>>,
}

/// Unitary for one evolution segment, stored block-diagonally.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator<T: Real> {
    dim: usize,
    blocks: Vec<UnitaryBlock<T>>,
    duration: T,
    mask_hash: Option<u64>,
}

impl<T: Real> Propagator<T> {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            blocks: (0..dim)
                .map(|k| UnitaryBlock {
                    indices: vec![k],
                    unitary: DMatrix::from_element(1, 1, c_real(T::one())),
                })
                .collect(),
            duration: T::zero(),
            mask_hash: None,
        }
    }

    /// Wraps a dense unitary. Fails if it is not unitary at the structural
    /// tolerance of `T` (scaled to the dimension).
    pub fn from_dense(unitary: DMatrix<C<T>>, duration: T) -> Result<Self> {
        if unitary.nrows() != unitary.ncols() {
            return Err(Error::DimensionMismatch {
                expected: unitary.nrows(),
                got: unitary.ncols(),
            });
        }
        let dim = unitary.nrows();
        let p = Self {
            dim,
            blocks: vec![UnitaryBlock {
                indices: (0..dim).collect(),
                unitary,
            }],
            duration,
            mask_hash: None,
        };
        let err = p.unitarity_error();
        if !(err <= T::structural_tolerance() * T::lit(100.0 * dim as f64)) {
            return Err(domain(format!(
                "matrix is not unitary (max |U†U - I| = {err})"
            )));
        }
        Ok(p)
    }

    pub fn with_mask_hash(mut self, hash: u64) -> Self {
        self.mask_hash = Some(hash);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn mask_hash(&self) -> Option<u64> {
        self.mask_hash
    }

    pub fn to_dense(&self) -> DMatrix<C<T>> {
        let mut u = DMatrix::from_element(self.dim, self.dim, C::<T>::default());
        for b in &self.blocks {
            for (r, &gr) in b.indices.iter().enumerate() {
                for (col, &gc) in b.indices.iter().enumerate() {
                    u[(gr, gc)] = b.unitary[(r, col)];
                }
            }
        }
        u
    }

    /// `max |U†U - I|`, block by block.
    pub fn unitarity_error(&self) -> T {
        self.blocks
            .iter()
            .map(|b| {
                let m = b.indices.len();
                let g = b.unitary.adjoint() * &b.unitary;
                let mut worst = T::zero();
                for r in 0..m {
                    for col in 0..m {
                        let target = if r == col { T::one() } else { T::zero() };
                        worst = worst.max(modulus(g[(r, col)] - c_real(target)));
                    }
                }
                worst
            })
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// The segment `later` applied after `self`.
    pub fn then(&self, later: &Self) -> Result<Self> {
        if later.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: later.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            blocks: vec![UnitaryBlock {
                indices: (0..self.dim).collect(),
                unitary: later.to_dense() * self.to_dense(),
            }],
            duration: self.duration + later.duration,
            mask_hash: None,
        })
    }

    pub(crate) fn apply_in_place(&self, amps: &mut [C<T>]) -> Result<()> {
        if amps.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: amps.len(),
            });
        }
        for b in &self.blocks {
            if b.indices.len() == 1 {
                let k = b.indices[0];
                amps[k] = b.unitary[(0, 0)] * amps[k];
                continue;
            }
            let x = DVector::from_iterator(b.indices.len(), b.indices.iter().map(|&k| amps[k]));
            let y = &b.unitary * x;
            for (pos, &k) in b.indices.iter().enumerate() {
                amps[k] = y[pos];
            }
        }
        Ok(())
    }
}

/// `exp(-i·M·dt)` for a Hermitian `M` in rad/s and `dt` in seconds.
pub fn segment_propagator<T: Real>(h: &HamiltonianMatrix<T>, dt: T) -> Result<Propagator<T>> {
    check_duration(dt)?;
    Eigensystem::new(h)?.propagator(dt)
}

pub fn apply_propagator<T: Real>(
    state: &StateVector<T>,
    u: &Propagator<T>,
) -> Result<StateVector<T>> {
    let mut out = state.clone();
    u.apply_in_place(out.amplitudes_mut())?;
    Ok(out)
}

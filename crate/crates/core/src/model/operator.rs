use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{c, c_real, modulus, Real, C};

/// Sparse complex operator on the `2ⁿ`-dimensional computational basis.
///
/// Entries are kept sorted row-major with no duplicate coordinates. Qubit 0
/// is the most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T> {
    dim: usize,
    entries: Vec<(usize, usize, C<T>)>,
}

/// The assembled spin Hamiltonian, in rad/s.
pub type HamiltonianMatrix<T = f64> = Operator<T>;

impl<T: Real> Operator<T> {
    /// Builds an operator from unsorted triplets; repeated coordinates are
    /// summed.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C<T>)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), C<T>> = BTreeMap::new();
        for (r, col, v) in triplets {
            if r >= dim || col >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.max(col) + 1,
                });
            }
            let slot = acc.entry((r, col)).or_default();
            *slot += v;
        }
        Ok(Self {
            dim,
            entries: acc.into_iter().map(|((r, col), v)| (r, col, v)).collect(),
        })
    }

    /// Trusted constructor for entries already sorted and unique.
    pub(crate) fn from_sorted(dim: usize, entries: Vec<(usize, usize, C<T>)>) -> Self {
        debug_assert!(entries
            .windows(2)
            .all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: (0..dim).map(|k| (k, k, c_real(T::one()))).collect(),
        }
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .map(|(k, &v)| (k, k, c_real(v)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C<T>)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.entries
            .binary_search_by(|&(r, cc, _)| (r, cc).cmp(&(row, col)))
            .map(|i| self.entries[i].2)
            .unwrap_or_default()
    }

    pub fn to_dense(&self) -> DMatrix<C<T>> {
        let mut m = DMatrix::from_element(self.dim, self.dim, C::<T>::default());
        for &(r, col, v) in &self.entries {
            m[(r, col)] = v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<C<T>>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for col in 0..m.ncols() {
                let v = m[(r, col)];
                if v != C::<T>::default() {
                    entries.push((r, col, v));
                }
            }
        }
        Ok(Self::from_sorted(m.nrows(), entries))
    }

    pub fn adjoint(&self) -> Self {
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|&(r, col, v)| (col, r, v.conj()))
            .collect();
        entries.sort_unstable_by_key(|&(r, col, _)| (r, col));
        Self::from_sorted(self.dim, entries)
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        Self::from_sorted(
            self.dim,
            self.entries
                .iter()
                .map(|&(r, col, v)| (r, col, v * factor))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_triplets(
            self.dim,
            self.entries.iter().chain(other.entries.iter()).copied(),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(c_real(-T::one())))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let starts = other.row_starts();
        let mut out = Vec::new();
        for &(r, k, a) in &self.entries {
            for &(_, col, b) in &other.entries[starts[k]..starts[k + 1]] {
                out.push((r, col, a * b));
            }
        }
        Self::from_triplets(self.dim, out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `y = self · x`.
    pub fn apply(&self, x: &[C<T>]) -> Result<Vec<C<T>>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut y = vec![C::<T>::default(); self.dim];
        for &(r, col, v) in &self.entries {
            y[r] += v * x[col];
        }
        Ok(y)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|&(_, _, v)| modulus(v))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `max |M - M†|` over all entries.
    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for &(r, col, v) in &self.entries {
            let d = modulus(v - self.get(col, r).conj());
            worst = worst.max(d);
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= T::structural_tolerance() * self.max_abs()
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn qubit_count(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    fn row_starts(&self) -> Vec<usize> {
        let mut starts = vec![0usize; self.dim + 1];
        for &(r, _, _) in &self.entries {
            starts[r + 1] += 1;
        }
        for k in 0..self.dim {
            starts[k + 1] += starts[k];
        }
        starts
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            })
        }
    }
}

/// Single-spin operator kinds for [`pauli_operator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliKind {
    X,
    Y,
    Z,
    /// σ₊ = |0⟩⟨1|
    Plus,
    /// σ₋ = |1⟩⟨0|
    Minus,
}

impl PauliKind {
    /// 2×2 matrix in the `{|0⟩, |1⟩}` basis, row-major.
    pub fn matrix<T: Real>(self) -> [[C<T>; 2]; 2] {
        let (o, l, i) = (C::<T>::default(), c_real(T::one()), c(T::zero(), T::one()));
        match self {
            PauliKind::X => [[o, l], [l, o]],
            PauliKind::Y => [[o, -i], [i, o]],
            PauliKind::Z => [[l, o], [o, -l]],
            PauliKind::Plus => [[o, l], [o, o]],
            PauliKind::Minus => [[o, o], [l, o]],
        }
    }
}

#[inline]
pub(crate) fn qubit_bit(n: usize, target: usize) -> usize {
    1usize << (n - 1 - target)
}

/// Embeds a single-spin operator at `target` in an `n`-qubit register.
pub fn pauli_operator<T: Real>(n: usize, target: usize, kind: PauliKind) -> Result<Operator<T>> {
    if target >= n {
        return Err(Error::QubitOutOfRange { index: target, n });
    }
    let dim = 1usize << n;
    let bit = qubit_bit(n, target);
    let m = kind.matrix::<T>();
    let zero = C::<T>::default();
    let mut entries = Vec::with_capacity(dim);
    for row in 0..dim {
        let row_bit = usize::from(row & bit != 0);
        // Each row has at most one nonzero: column differs only in `bit`.
        let mut cols = [(row & !bit, m[row_bit][0]), (row | bit, m[row_bit][1])];
        cols.sort_unstable_by_key(|&(col, _)| col);
        for (col, v) in cols {
            if v != zero {
                entries.push((row, col, v));
            }
        }
    }
    Ok(Operator::from_sorted(dim, entries))
}

/// `Σ_j σ_z⁽ʲ⁾` as a diagonal operator.
pub fn total_z<T: Real>(n: usize) -> Operator<T> {
    let dim = 1usize << n;
    let values: Vec<T> = (0..dim)
        .map(|k| {
            let ones = k.count_ones() as f64;
            T::lit(n as f64 - 2.0 * ones)
        })
        .collect();
    Operator::diagonal(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    type Cf = C<f64>;

    fn kron(a: &DMatrix<Cf>, b: &DMatrix<Cf>) -> DMatrix<Cf> {
        a.kronecker(b)
    }

    fn two_by_two(m: [[Cf; 2]; 2]) -> DMatrix<Cf> {
        DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
    }

    // Kronecker-product route, independent of the bit-twiddling embedding.
    fn kron_embed(n: usize, target: usize, kind: PauliKind) -> DMatrix<Cf> {
        let eye = DMatrix::<Cf>::identity(2, 2);
        let mut out = DMatrix::<Cf>::identity(1, 1);
        for q in 0..n {
            let f = if q == target {
                two_by_two(kind.matrix())
            } else {
                eye.clone()
            };
            out = kron(&out, &f);
        }
        out
    }

    #[test]
    fn embedding_matches_kronecker_products() {
        for n in 1..=4 {
            for target in 0..n {
                for kind in [
                    PauliKind::X,
                    PauliKind::Y,
                    PauliKind::Z,
                    PauliKind::Plus,
                    PauliKind::Minus,
                ] {
                    let a = pauli_operator::<f64>(n, target, kind).unwrap().to_dense();
                    let b = kron_embed(n, target, kind);
                    assert_eq!(a, b, "n={n} target={target} {kind:?}");
                }
            }
        }
    }

    #[test]
    fn z_convention_on_ground_state() {
        let z = pauli_operator::<f64>(1, 0, PauliKind::Z).unwrap();
        let y = z.apply(&[c_real(1.0), c_real(0.0)]).unwrap();
        assert_eq!(y, vec![c_real(1.0), c_real(0.0)]);
    }

    #[test]
    fn flip_flop_moves_excitation() {
        let plus0 = pauli_operator::<f64>(2, 0, PauliKind::Plus).unwrap();
        let minus1 = pauli_operator::<f64>(2, 1, PauliKind::Minus).unwrap();
        let ff = plus0.mul(&minus1).unwrap();
        // |10⟩ is index 2, |01⟩ is index 1.
        let mut psi = vec![Cf::default(); 4];
        psi[2] = c_real(1.0);
        let out = ff.apply(&psi).unwrap();
        let mut expected = vec![Cf::default(); 4];
        expected[1] = c_real(1.0);
        assert_eq!(out, expected);
    }

    #[test]
    fn raising_plus_lowering_is_x() {
        for n in 1..=3 {
            for t in 0..n {
                let p = pauli_operator::<f64>(n, t, PauliKind::Plus).unwrap();
                let m = pauli_operator::<f64>(n, t, PauliKind::Minus).unwrap();
                let x = pauli_operator::<f64>(n, t, PauliKind::X).unwrap();
                assert_eq!(p.add(&m).unwrap(), x);
            }
        }
    }

    #[test]
    fn out_of_range_target() {
        assert!(matches!(
            pauli_operator::<f64>(3, 3, PauliKind::X),
            Err(Error::QubitOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn sparse_product_matches_dense() {
        let a = pauli_operator::<f64>(3, 1, PauliKind::Y).unwrap();
        let b = pauli_operator::<f64>(3, 2, PauliKind::Plus)
            .unwrap()
            .add(&pauli_operator(3, 0, PauliKind::Z).unwrap())
            .unwrap();
        let sparse = a.mul(&b).unwrap().to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert_eq!(sparse, dense);
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let p = pauli_operator::<f64>(2, 1, PauliKind::Plus).unwrap();
        assert_eq!(
            p.adjoint(),
            pauli_operator::<f64>(2, 1, PauliKind::Minus).unwrap()
        );
        assert!(!p.is_hermitian());
        assert!(pauli_operator::<f64>(2, 1, PauliKind::Y)
            .unwrap()
            .is_hermitian());
    }

    #[test]
    fn total_z_is_sum_of_embeddings() {
        let n = 3;
        let mut sum = Operator::<f64>::zeros(8);
        for q in 0..n {
            sum = sum
                .add(&pauli_operator(n, q, PauliKind::Z).unwrap())
                .unwrap();
        }
        assert_eq!(sum.to_dense(), total_z::<f64>(n).to_dense());
    }
}

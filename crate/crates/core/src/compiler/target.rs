use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::model::qubit_bit;
use crate::scalar::{c, c_real, modulus, Real, C};

/// Global-phase-insensitive gate fidelity `|Tr(U†V)| / dim`.
pub fn fidelity<T: Real>(u: &DMatrix<C<T>>, v: &DMatrix<C<T>>) -> Result<T> {
    if u.shape() != v.shape() || u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            got: v.nrows(),
        });
    }
    let dim = u.nrows();
    if dim == 0 {
        return Err(domain("fidelity of empty matrices"));
    }
    let trace = u
        .iter()
        .zip(v.iter())
        .fold(C::<T>::default(), |acc, (a, b)| acc + a.conj() * b);
    Ok(modulus(trace) / T::lit(dim as f64))
}

/// A 1-3 qubit unitary acting on named spins of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetUnitary<T: Real> {
    pub name: String,
    pub matrix: DMatrix<C<T>>,
    /// Chain indices; the first is the most significant bit of `matrix`.
    pub qubits: Vec<usize>,
}

impl<T: Real> TargetUnitary<T> {
    pub fn new(name: impl Into<String>, matrix: DMatrix<C<T>>, qubits: Vec<usize>) -> Result<Self> {
        let k = qubits.len();
        if !(1..=3).contains(&k) {
            return Err(domain(format!("targets act on 1 to 3 qubits, got {k}")));
        }
        if qubits
            .iter()
            .enumerate()
            .any(|(a, q)| qubits[..a].contains(q))
        {
            return Err(domain("target qubits repeat"));
        }
        let dim = 1usize << k;
        if matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        let err = (matrix.adjoint() * &matrix - DMatrix::identity(dim, dim))
            .iter()
            .fold(T::zero(), |m, z| m.max(modulus(*z)));
        if err > T::lit(1e3) * T::structural_tolerance() {
            return Err(domain(format!("target is not unitary (error {err})")));
        }
        Ok(Self {
            name: name.into(),
            matrix,
            qubits,
        })
    }

    fn two(name: &str, rows: [[C<T>; 4]; 4], i: usize, j: usize) -> Result<Self> {
        let m = DMatrix::from_fn(4, 4, |r, c| rows[r][c]);
        Self::new(name, m, vec![i, j])
    }

    /// `|01⟩ → i|10⟩`, `|10⟩ → i|01⟩`.
    pub fn iswap(i: usize, j: usize) -> Result<Self> {
        let (o, l, im) = (C::default(), c_real(T::one()), c(T::zero(), T::one()));
        Self::two(
            "iswap",
            [[l, o, o, o], [o, o, im, o], [o, im, o, o], [o, o, o, l]],
            i,
            j,
        )
    }

    /// Controlled-NOT with control `i`, target `j`.
    pub fn cnot(i: usize, j: usize) -> Result<Self> {
        let (o, l) = (C::default(), c_real(T::one()));
        Self::two(
            "cnot",
            [[l, o, o, o], [o, l, o, o], [o, o, o, l], [o, o, l, o]],
            i,
            j,
        )
    }

    pub fn swap(i: usize, j: usize) -> Result<Self> {
        let (o, l) = (C::default(), c_real(T::one()));
        Self::two(
            "swap",
            [[l, o, o, o], [o, o, l, o], [o, l, o, o], [o, o, o, l]],
            i,
            j,
        )
    }

    pub fn identity(qubits: Vec<usize>) -> Result<Self> {
        let dim = 1usize << qubits.len().min(3);
        Self::new("identity", DMatrix::identity(dim, dim), qubits)
    }

    /// Single-spin rotation `exp(-iθ(a·σ)/2)`.
    pub fn rotation(target: usize, axis: [T; 3], angle: T) -> Result<Self> {
        let g = crate::engine::rotation_matrix(axis, angle)?;
        let m = DMatrix::from_fn(2, 2, |r, c| g[r][c]);
        Self::new("rotation", m, vec![target])
    }

    /// The target as a `2^n` matrix acting as identity on the other spins.
    pub fn embed(&self, n: usize) -> Result<DMatrix<C<T>>> {
        crate::engine::check_qubit_count(n)?;
        for &q in &self.qubits {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        let k = self.qubits.len();
        let bits: Vec<usize> = self.qubits.iter().map(|&q| qubit_bit(n, q)).collect();
        let place = |s: usize| {
            (0..k).fold(0, |acc, a| {
                if s & (1 << (k - 1 - a)) != 0 {
                    acc | bits[a]
                } else {
                    acc
                }
            })
        };
        let all: usize = bits.iter().sum();
        let dim = 1usize << n;
        let mut full = DMatrix::<C<T>>::zeros(dim, dim);
        for col in 0..dim {
            let s = (0..k).fold(0, |acc, a| (acc << 1) | usize::from(col & bits[a] != 0));
            let base = col & !all;
            for s_out in 0..(1 << k) {
                full[(base | place(s_out), col)] = self.matrix[(s_out, s)];
            }
        }
        Ok(full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_ignores_global_phase() {
        let u = TargetUnitary::<f64>::iswap(0, 1).unwrap().matrix;
        let v = u.map(|z| z * crate::scalar::cis(0.7));
        assert!((fidelity(&u, &v).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_vs_identity() {
        let s = TargetUnitary::<f64>::swap(0, 1).unwrap().matrix;
        let id = DMatrix::identity(4, 4);
        assert!((fidelity(&s, &id).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn embedding_matches_kronecker() {
        let x = TargetUnitary::<f64>::rotation(1, [1.0, 0.0, 0.0], 0.3).unwrap();
        let e = x.embed(3).unwrap();
        let id2 = DMatrix::<C<f64>>::identity(2, 2);
        let expected = id2.kronecker(&x.matrix).kronecker(&id2);
        assert!((e - expected).norm() < 1e-15);
    }

    #[test]
    fn reversed_qubit_order_embeds_swapped() {
        let a = TargetUnitary::<f64>::cnot(1, 0).unwrap().embed(2).unwrap();
        // CNOT controlled on spin 1 flips spin 0: |01⟩ ↔ |11⟩.
        let one = c_real(1.0);
        assert_eq!(a[(3, 1)], one);
        assert_eq!(a[(1, 3)], one);
        assert_eq!(a[(0, 0)], one);
        assert_eq!(a[(2, 2)], one);
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(TargetUnitary::<f64>::cnot(0, 0).is_err());
        assert!(TargetUnitary::<f64>::new("x", DMatrix::identity(3, 3), vec![0, 1]).is_err());
        let m = DMatrix::from_element(2, 2, c_real(1.0));
        assert!(TargetUnitary::<f64>::new("x", m, vec![0]).is_err());
        assert!(TargetUnitary::<f64>::iswap(0, 3).unwrap().embed(3).is_err());
    }
}

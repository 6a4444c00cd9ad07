//! Reference implementations used only by tests. None of them call into the
//! library's numerics.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Complex64 = Complex<f64>;
pub type CMat = DMatrix<Complex64>;

/// `exp(-i·H·t)` by scaling and squaring of a truncated Taylor series.
pub fn expm_minus_i(h: &CMat, t: f64) -> CMat {
    let a = h.map(|z| z * Complex64::new(0.0, -t));
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * a.nrows() as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * Complex64::new(scale, 0.0);
    let dim = a.nrows();
    let mut sum = CMat::identity(dim, dim);
    let mut term = CMat::identity(dim, dim);
    for k in 1..=30 {
        term = &term * &a * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn random_hermitian(dim: usize, scale: f64, rng: &mut impl Rng) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(scale * rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z =
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `P(X >= k)` for `X ~ Binomial(n, p)`, by direct summation with
/// multiplicatively built coefficients.
pub fn binomial_upper_tail(n: u64, k: u64, p: f64) -> f64 {
    let mut total = 0.0;
    for j in k..=n {
        let mut coeff = 1.0;
        for m in 0..j {
            coeff *= (n - m) as f64 / (m + 1) as f64;
        }
        total += coeff * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
    }
    total
}

/// True if `hits` out of `trials` is within `z` standard errors of `p`.
pub fn within_sigma(hits: usize, trials: usize, p: f64, z: f64) -> bool {
    let freq = hits as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (freq - p).abs() <= z * sigma.max(1.0 / trials as f64)
}

pub fn pauli(kind: char) -> CMat {
    let (o, l, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    let v = match kind {
        'I' => [l, o, o, l],
        'X' => [o, l, l, o],
        'Y' => [o, -i, i, o],
        'Z' => [l, o, o, -l],
        _ => panic!("unknown Pauli {kind}"),
    };
    CMat::from_row_slice(2, 2, &v)
}

/// `kron(ops[0], ops[1], ...)`, qubit 0 most significant.
pub fn kron_all(ops: &[CMat]) -> CMat {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, m| acc.kronecker(m))
}

/// Single-spin `exp(-iθ(a·σ)/2)` via the Pauli expansion.
pub fn rotation(axis: [f64; 3], angle: f64) -> CMat {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let gen = pauli('X') * Complex64::new(axis[0], 0.0)
        + pauli('Y') * Complex64::new(axis[1], 0.0)
        + pauli('Z') * Complex64::new(axis[2], 0.0);
    pauli('I') * Complex64::new(c, 0.0) - gen * Complex64::new(0.0, s)
}

/// `rotation` acting on spin `q` of `n`.
pub fn embed_single(n: usize, q: usize, gate: &CMat) -> CMat {
    let ops: Vec<CMat> = (0..n)
        .map(|k| if k == q { gate.clone() } else { pauli('I') })
        .collect();
    kron_all(&ops)
}

/// Dense XY-chain Hamiltonian built from Kronecker products.
pub fn dense_hamiltonian(omegas: &[f64], couplings: &[(usize, usize, f64)]) -> CMat {
    let n = omegas.len();
    let dim = 1 << n;
    let mut h = CMat::zeros(dim, dim);
    for (q, &w) in omegas.iter().enumerate() {
        h -= embed_single(n, q, &pauli('Z')) * Complex64::new(w, 0.0);
    }
    for &(i, j, jij) in couplings {
        // σ+σ- + σ-σ+ = (XX + YY)/2
        let xx = embed_single(n, i, &pauli('X')) * embed_single(n, j, &pauli('X'));
        let yy = embed_single(n, i, &pauli('Y')) * embed_single(n, j, &pauli('Y'));
        h -= (xx + yy) * Complex64::new(jij / 2.0, 0.0);
    }
    h
}

/// Global-phase-insensitive fidelity `|Tr(U†V)|/dim`.
pub fn gate_fidelity(u: &CMat, v: &CMat) -> f64 {
    (u.adjoint() * v).trace().norm() / u.nrows() as f64
}

//! Oracles shared by the integration tests. Everything here is built from
//! the incidence function and the weight slices alone, never from the
//! library's assembled operators.

#![allow(dead_code)]

use hodgeseq::weights::{IndependentModel, Provenance, WeightFunction};
use hodgeseq::{Cell, ComplexIndex};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn has_dim(c: &ComplexIndex, dim: isize) -> bool {
    dim >= c.min_dim() && dim <= c.top_dim()
}

pub fn cells(c: &ComplexIndex, dim: isize) -> Vec<Cell> {
    if has_dim(c, dim) {
        c.cells(dim).collect()
    } else {
        Vec::new()
    }
}

/// `D_n[τ, σ] = κ(τ, σ)` for `τ` of dimension `n+1`, `σ` of dimension `n`.
pub fn integer_coboundary(c: &ComplexIndex, n: isize) -> Vec<Vec<i64>> {
    let lower = cells(c, n);
    cells(c, n + 1)
        .iter()
        .map(|tau| lower.iter().map(|sigma| c.incidence(tau, sigma)).collect())
        .collect()
}

pub fn dense_coboundary(c: &ComplexIndex, n: isize) -> DMatrix<f64> {
    let rows = integer_coboundary(c, n);
    let ncols = cells(c, n).len();
    DMatrix::from_fn(rows.len(), ncols, |r, k| rows[r][k] as f64)
}

pub fn weight_vec(c: &ComplexIndex, w: &WeightFunction<f64>, dim: isize) -> DVector<f64> {
    if has_dim(c, dim) {
        DVector::from_column_slice(w.slice(dim))
    } else {
        DVector::zeros(0)
    }
}

/// `W_n⁻¹ D_nᵀ W_{n+1} D_n`.
pub fn oracle_up(c: &ComplexIndex, w: &WeightFunction<f64>, n: isize) -> DMatrix<f64> {
    let d = dense_coboundary(c, n);
    let wn = weight_vec(c, w, n);
    let wu = weight_vec(c, w, n + 1);
    let inv = DMatrix::from_diagonal(&wn.map(|x| 1.0 / x));
    inv * d.transpose() * DMatrix::from_diagonal(&wu) * d
}

/// `D_{n-1} W_{n-1}⁻¹ D_{n-1}ᵀ W_n`.
pub fn oracle_down(c: &ComplexIndex, w: &WeightFunction<f64>, n: isize) -> DMatrix<f64> {
    let d = dense_coboundary(c, n - 1);
    let wl = weight_vec(c, w, n - 1);
    let wn = weight_vec(c, w, n);
    let size = wn.len();
    if wl.is_empty() {
        return DMatrix::zeros(size, size);
    }
    &d * DMatrix::from_diagonal(&wl.map(|x| 1.0 / x)) * d.transpose() * DMatrix::from_diagonal(&wn)
}

pub fn oracle_laplacian(c: &ComplexIndex, w: &WeightFunction<f64>, n: isize) -> DMatrix<f64> {
    oracle_up(c, w, n) + oracle_down(c, w, n)
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    (a - b).abs().max()
}

pub fn random_weights(c: &ComplexIndex, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> WeightFunction<f64> {
    WeightFunction::from_fn(c, Provenance::Raw, |_| rng.gen_range(lo..hi)).unwrap()
}

pub fn unit_weights(c: &ComplexIndex) -> WeightFunction<f64> {
    WeightFunction::from_fn(c, Provenance::Raw, |_| 1.0).unwrap()
}

/// Positive weights summing to one.
pub fn random_simplex_point(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

pub fn random_sequence_model(m: usize, rng: &mut ChaCha8Rng) -> IndependentModel<f64> {
    IndependentModel::sequence(random_simplex_point(m, rng), 1e-12).unwrap()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sorted multiset `{λ: mult}` with `mult = C(n+1, λ-1)(m-1)^(λ-1)`.
pub fn expected_sequence_eigenvalues(m: usize, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..=n + 1 {
        let mult = binomial(n as u64 + 1, k as u64) * (m as u64 - 1).pow(k as u32);
        out.extend(std::iter::repeat_n((k + 1) as f64, mult as usize));
    }
    out
}

/// Ascending eigenvalues of `W^{1/2} M W^{-1/2}` for an operator `M` that
/// is self-adjoint in the `w`-weighted inner product.
pub fn weighted_eigenvalues(m: &DMatrix<f64>, weights: &DVector<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let s = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        m[(i, j)] * weights[i].sqrt() / weights[j].sqrt()
    });
    let sym = (&s + s.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Eigenvalues above `tol * max(1, max|λ|)`.
pub fn nonzero(values: &[f64], tol: f64) -> Vec<f64> {
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    values.iter().copied().filter(|v| v.abs() > tol * scale).collect()
}

/// Largest elementwise gap between two sorted multisets, or infinity when
/// their sizes differ.
pub fn multiset_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn weighted_inner(w: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    w.iter().zip(a.iter().zip(b.iter())).map(|(w, (a, b))| w * a * b).sum()
}

pub fn random_cochain(size: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(size, |_, _| rng.gen_range(-1.0..1.0))
}

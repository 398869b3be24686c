use nalgebra::{DMatrix, DVector};

use super::coboundary::{coboundary_matrix, IncidenceMatrix};
use crate::complex::ComplexIndex;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weights::{check_layout, WeightFunction};

/// Real-valued function on the cells of one dimension, in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain<T: Real> {
    pub dim: isize,
    pub values: DVector<T>,
}

impl<T: Real> Cochain<T> {
    pub fn new(dim: isize, values: DVector<T>) -> Self {
        Cochain { dim, values }
    }

    pub fn zeros(complex: &ComplexIndex, dim: isize) -> Self {
        Cochain { dim, values: DVector::zeros(complex.cell_count(dim)) }
    }

    pub fn constant(complex: &ComplexIndex, dim: isize, value: T) -> Self {
        Cochain { dim, values: DVector::from_element(complex.cell_count(dim), value) }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Weighted inner product `⟨f, g⟩ = Σ_σ w(σ) f(σ) g(σ)`.
pub fn weighted_inner<T: Real>(weights: &DVector<T>, f: &DVector<T>, g: &DVector<T>) -> T {
    weights.iter().zip(f.iter()).zip(g.iter()).fold(T::zero(), |acc, ((&w, &a), &b)| acc + w * a * b)
}

pub fn weighted_norm<T: Real>(weights: &DVector<T>, f: &DVector<T>) -> T {
    weighted_inner(weights, f, f).sqrt()
}

/// All operators of the Hodge Laplacian at one dimension `n`.
///
/// `up = W_n⁻¹ D_nᵀ W_{n+1} D_n`, `down = D_{n-1} W_{n-1}⁻¹ D_{n-1}ᵀ W_n`,
/// `full = up + down`, and `symmetric = W_n^{1/2} full W_n^{-1/2}`.
#[derive(Debug, Clone)]
pub struct LaplacianBundle<T: Real> {
    pub dim: isize,
    /// `D_{n-1}`.
    pub lower: IncidenceMatrix,
    /// `D_n`.
    pub upper: IncidenceMatrix,
    pub weights_lower: DVector<T>,
    pub weights: DVector<T>,
    pub weights_upper: DVector<T>,
    pub up: DMatrix<T>,
    pub down: DMatrix<T>,
    pub full: DMatrix<T>,
    pub symmetric: DMatrix<T>,
}

fn check_dim(complex: &ComplexIndex, n: isize) -> Result<()> {
    if n < complex.min_dim() || n > complex.top_dim() {
        return Err(Error::DimensionOutOfRange {
            dim: n,
            min: complex.min_dim(),
            max: complex.max_dim(),
        });
    }
    if complex.is_truncated_above(n) {
        return Err(Error::Truncation { dim: n, max_dim: complex.max_dim() });
    }
    Ok(())
}

/// Checks that `n` is a dimension with a complete Laplacian.
pub(crate) fn require_laplacian_dim(complex: &ComplexIndex, n: isize) -> Result<()> {
    check_dim(complex, n)
}

impl<T: Real> LaplacianBundle<T> {
    pub fn assemble(complex: &ComplexIndex, w: &WeightFunction<T>, n: isize) -> Result<Self> {
        check_dim(complex, n)?;
        check_layout(complex, w)?;
        let lower = coboundary_matrix(complex, n - 1);
        let upper = coboundary_matrix(complex, n);
        let weights_lower = DVector::from_column_slice(w.slice(n - 1));
        let weights = DVector::from_column_slice(w.slice(n));
        let weights_upper = DVector::from_column_slice(w.slice(n + 1));
        let size = weights.len();

        // Dᵀ W D accumulated row by row of D_n, then scaled by W_n⁻¹.
        let mut up = DMatrix::zeros(size, size);
        for (r, row) in upper.rows().enumerate() {
            let wr = weights_upper[r];
            for &(i, a) in row {
                for &(j, b) in row {
                    up[(i, j)] += wr * T::lit((a * b) as f64);
                }
            }
        }
        for i in 0..size {
            let inv = T::one() / weights[i];
            up.row_mut(i).scale_mut(inv);
        }

        // D W⁻¹ Dᵀ accumulated over the cells of dimension n - 1, then W_n.
        let mut down = DMatrix::zeros(size, size);
        for (k, column) in lower.transpose().rows().enumerate() {
            let inv = T::one() / weights_lower[k];
            for &(i, a) in column {
                for &(j, b) in column {
                    down[(i, j)] += inv * T::lit((a * b) as f64);
                }
            }
        }
        for j in 0..size {
            let wj = weights[j];
            down.column_mut(j).scale_mut(wj);
        }

        let full = &up + &down;
        let sqrt_w: Vec<T> = weights.iter().map(|w| w.sqrt()).collect();
        let symmetric = DMatrix::from_fn(size, size, |i, j| full[(i, j)] * sqrt_w[i] / sqrt_w[j]);
        Ok(LaplacianBundle {
            dim: n,
            lower,
            upper,
            weights_lower,
            weights,
            weights_upper,
            up,
            down,
            full,
            symmetric,
        })
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    /// Matrix of `δ_n*`: `W_n⁻¹ D_nᵀ W_{n+1}`.
    pub fn adjoint_matrix(&self) -> DMatrix<T> {
        adjoint(&self.upper, &self.weights, &self.weights_upper)
    }

    /// Matrix of `δ_{n-1}*`: `W_{n-1}⁻¹ D_{n-1}ᵀ W_n`.
    pub fn lower_adjoint_matrix(&self) -> DMatrix<T> {
        adjoint(&self.lower, &self.weights_lower, &self.weights)
    }

    pub fn inner(&self, f: &DVector<T>, g: &DVector<T>) -> T {
        weighted_inner(&self.weights, f, g)
    }

    pub fn norm(&self, f: &DVector<T>) -> T {
        weighted_norm(&self.weights, f)
    }

    pub fn apply(&self, f: &DVector<T>) -> DVector<T> {
        &self.full * f
    }
}

fn adjoint<T: Real>(d: &IncidenceMatrix, w_dom: &DVector<T>, w_cod: &DVector<T>) -> DMatrix<T> {
    let mut m = DMatrix::zeros(d.ncols(), d.nrows());
    for (r, row) in d.rows().enumerate() {
        for &(c, v) in row {
            m[(c, r)] = w_cod[r] / w_dom[c] * T::lit(v as f64);
        }
    }
    m
}

/// Assembles the Laplacian bundle at dimension `n`.
pub fn laplacian<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    n: isize,
) -> Result<LaplacianBundle<T>> {
    LaplacianBundle::assemble(complex, w, n)
}

/// `δ_n*` as a dense matrix.
pub fn adjoint_matrix<T: Real>(bundle: &LaplacianBundle<T>) -> DMatrix<T> {
    bundle.adjoint_matrix()
}

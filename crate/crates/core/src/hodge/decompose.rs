use nalgebra::{DMatrix, DVector};

use super::laplacian::{weighted_inner, weighted_norm, LaplacianBundle};
use crate::error::{Error, Result};
use crate::linalg::{Subspace, RANK_TOL};
use crate::scalar::Real;

/// Weighted-orthogonal projectors onto the exact space `im δ_{n-1}` and the
/// coexact space `im δ_n*`, held as orthonormal bases in the coordinates
/// `y = W_n^{1/2} x` where the weighted inner product is Euclidean.
#[derive(Debug, Clone)]
pub struct HodgeProjector<T: Real> {
    sqrt_w: DVector<T>,
    exact: Subspace<T>,
    coexact: Subspace<T>,
}

impl<T: Real> HodgeProjector<T> {
    pub fn new(bundle: &LaplacianBundle<T>) -> Self {
        let size = bundle.size();
        let sqrt_w = bundle.weights.map(|w| w.sqrt());
        // Exact space: columns of D_{n-1}, scaled to y-coordinates.
        let lower = bundle.lower.to_dense::<T>();
        let exact_span = DMatrix::from_fn(size, lower.ncols(), |i, j| lower[(i, j)] * sqrt_w[i]);
        // Coexact space: columns of W_n⁻¹ D_nᵀ, i.e. W_n^{-1/2} D_nᵀ in y.
        let upper_t = bundle.upper.transpose().to_dense::<T>();
        let coexact_span =
            DMatrix::from_fn(size, upper_t.ncols(), |i, j| upper_t[(i, j)] / sqrt_w[i]);
        HodgeProjector {
            sqrt_w,
            exact: Subspace::span_of(&exact_span, RANK_TOL),
            coexact: Subspace::span_of(&coexact_span, RANK_TOL),
        }
    }

    pub fn exact_rank(&self) -> usize {
        self.exact.dim()
    }

    pub fn coexact_rank(&self) -> usize {
        self.coexact.dim()
    }

    /// Dimension of the harmonic space implied by the two ranks.
    pub fn harmonic_dim(&self) -> usize {
        self.sqrt_w.len() - self.exact_rank() - self.coexact_rank()
    }

    fn to_y(&self, x: &DVector<T>) -> DVector<T> {
        x.component_mul(&self.sqrt_w)
    }

    fn to_x(&self, y: &DVector<T>) -> DVector<T> {
        y.component_div(&self.sqrt_w)
    }

    pub fn project_exact(&self, x: &DVector<T>) -> DVector<T> {
        self.to_x(&self.exact.project(&self.to_y(x)))
    }

    pub fn project_coexact(&self, x: &DVector<T>) -> DVector<T> {
        self.to_x(&self.coexact.project(&self.to_y(x)))
    }

    pub fn split(&self, dim: isize, x: &DVector<T>) -> Result<HodgeSplit<T>> {
        if x.len() != self.sqrt_w.len() {
            return Err(Error::DimensionMismatch { expected: self.sqrt_w.len(), found: x.len() });
        }
        let exact = self.project_exact(x);
        let coexact = self.project_coexact(x);
        let harmonic = x - &exact - &coexact;
        Ok(HodgeSplit {
            dim,
            weights: self.sqrt_w.map(|s| s * s),
            input: x.clone(),
            harmonic,
            exact,
            coexact,
        })
    }
}

/// `input = harmonic + exact + coexact` with the three parts mutually
/// orthogonal in the weighted inner product.
#[derive(Debug, Clone)]
pub struct HodgeSplit<T: Real> {
    pub dim: isize,
    pub weights: DVector<T>,
    pub input: DVector<T>,
    pub harmonic: DVector<T>,
    pub exact: DVector<T>,
    pub coexact: DVector<T>,
}

impl<T: Real> HodgeSplit<T> {
    /// `‖input - Σ parts‖_w / ‖input‖_w` (absolute when the input is zero).
    pub fn reconstruction_error(&self) -> T {
        let sum = &self.harmonic + &self.exact + &self.coexact;
        let err = weighted_norm(&self.weights, &(&self.input - sum));
        let norm = weighted_norm(&self.weights, &self.input);
        if norm > T::zero() {
            err / norm
        } else {
            err
        }
    }

    /// Largest `|⟨a, b⟩_w| / ‖input‖_w²` over the three pairs of parts.
    pub fn max_cross_inner(&self) -> T {
        let parts = [&self.harmonic, &self.exact, &self.coexact];
        let norm2 = weighted_inner(&self.weights, &self.input, &self.input);
        let scale = if norm2 > T::zero() { norm2 } else { T::one() };
        let mut worst = T::zero();
        for a in 0..3 {
            for b in a + 1..3 {
                worst = worst.max(weighted_inner(&self.weights, parts[a], parts[b]).abs() / scale);
            }
        }
        worst
    }
}

/// Hodge decomposition of one cochain.
pub fn hodge_decompose<T: Real>(bundle: &LaplacianBundle<T>, cochain: &DVector<T>) -> Result<HodgeSplit<T>> {
    HodgeProjector::new(bundle).split(bundle.dim, cochain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexIndex;
    use crate::hodge::laplacian;
    use crate::weights::{Provenance, WeightFunction};

    #[test]
    fn triangle_cycle_is_fully_harmonic() {
        let c = ComplexIndex::simplicial(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let w = WeightFunction::from_fn(&c, Provenance::Raw, |_| 1.0).unwrap();
        let b = laplacian(&c, &w, 1).unwrap();
        let cycle = DVector::from_vec(vec![1.0, -1.0, 1.0]);
        let split = hodge_decompose(&b, &cycle).unwrap();
        assert!((&split.harmonic - &cycle).norm() < 1e-12);
        assert!(split.exact.norm() < 1e-12 && split.coexact.norm() < 1e-12);
    }

    #[test]
    fn exact_input_is_recovered() {
        let c = ComplexIndex::full_simplex(4).unwrap();
        let w = WeightFunction::from_fn(&c, Provenance::Raw, |cell| 1.0 + cell.len() as f64 * 0.3)
            .unwrap();
        let b = laplacian(&c, &w, 1).unwrap();
        let g = DVector::from_vec(vec![0.5, -1.0, 2.0, 0.25]);
        let x = b.lower.to_dense::<f64>() * g;
        let split = hodge_decompose(&b, &x).unwrap();
        assert!((&split.exact - &x).norm() < 1e-10);
        assert!(split.harmonic.norm() < 1e-10 && split.coexact.norm() < 1e-10);
        assert!(split.reconstruction_error() < 1e-14);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let c = ComplexIndex::full_simplex(3).unwrap();
        let w = WeightFunction::from_fn(&c, Provenance::Raw, |_| 1.0).unwrap();
        let b = laplacian(&c, &w, 0).unwrap();
        assert!(matches!(
            hodge_decompose(&b, &DVector::zeros(2)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }
}

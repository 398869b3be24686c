//! Dense helpers: rank-revealing orthonormalization and numerical rank.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// Relative threshold used to decide numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis of a column span, found by Gram–Schmidt with
/// column-norm pivoting (each step takes the column with the largest
/// remaining norm; the sweep stops once that norm drops below
/// `rel_tol * ‖A‖`, where `‖A‖` is the largest column norm).
#[derive(Debug, Clone)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> Subspace<T> {
    pub fn span_of(a: &DMatrix<T>, rel_tol: f64) -> Self {
        let n = a.nrows();
        let mut cols: Vec<DVector<T>> = a.column_iter().map(|c| c.into_owned()).collect();
        let mut norms: Vec<T> = cols.iter().map(|c| c.norm_squared()).collect();
        let scale = norms.iter().fold(T::zero(), |acc, &v| acc.max(v)).sqrt();
        let threshold = T::lit(rel_tol) * scale;
        let mut basis: Vec<DVector<T>> = Vec::new();
        let mut used = vec![false; cols.len()];
        while basis.len() < n {
            let pick = (0..cols.len())
                .filter(|&j| !used[j])
                .max_by(|&i, &j| norms[i].partial_cmp(&norms[j]).unwrap_or(std::cmp::Ordering::Equal));
            let Some(j) = pick else { break };
            used[j] = true;
            let mut q = cols[j].clone();
            // Re-orthogonalize against the accepted basis to stop drift.
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.dot(&q);
                    q.axpy(-proj, b, T::one());
                }
            }
            let norm = q.norm();
            if !(norm > threshold) || norm == T::zero() {
                break;
            }
            q /= norm;
            for k in 0..cols.len() {
                if !used[k] {
                    let proj = q.dot(&cols[k]);
                    cols[k].axpy(-proj, &q, T::one());
                    norms[k] = cols[k].norm_squared();
                }
            }
            basis.push(q);
        }
        let basis = if basis.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&basis)
        };
        Subspace { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    /// Euclidean orthogonal projection onto the subspace.
    pub fn project(&self, x: &DVector<T>) -> DVector<T> {
        if self.dim() == 0 {
            return DVector::zeros(x.len());
        }
        let coeffs = self.basis.tr_mul(x);
        &self.basis * coeffs
    }
}

/// Numerical rank at relative threshold `rel_tol`.
pub fn rank<T: Real>(a: &DMatrix<T>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    // Orthonormalize whichever side is shorter.
    if a.ncols() <= a.nrows() {
        Subspace::span_of(a, rel_tol).dim()
    } else {
        Subspace::span_of(&a.transpose(), rel_tol).dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_rank_deficient() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 1.0, 0.0, 1.0]);
        assert_eq!(rank(&a, RANK_TOL), 2);
        assert_eq!(rank(&DMatrix::<f64>::zeros(4, 2), RANK_TOL), 0);
        assert_eq!(rank(&DMatrix::<f64>::identity(5, 7), RANK_TOL), 5);
    }

    #[test]
    fn projection_is_idempotent() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 2.0, -1.0]);
        let s = Subspace::span_of(&a, RANK_TOL);
        assert_eq!(s.dim(), 2);
        let x = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let p = s.project(&x);
        let pp = s.project(&p);
        assert!((p - pp).norm() < 1e-14);
        let btb = s.basis().tr_mul(s.basis());
        assert!((btb - DMatrix::identity(2, 2)).norm() < 1e-14);
    }
}

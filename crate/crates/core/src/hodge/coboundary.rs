use nalgebra::DMatrix;

use crate::complex::ComplexIndex;
use crate::scalar::Real;

/// Sparse integer matrix of a coboundary `D_n` in the `e_σ` basis.
///
/// Rows are cells of dimension `n + 1`, columns cells of dimension `n`.
/// Entries stay in `i64` so products like `D_n D_{n-1}` are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    nrows: usize,
    ncols: usize,
    /// Per row, `(column, value)` sorted by column with no zeros.
    rows: Vec<Vec<(usize, i64)>>,
}

impl IncidenceMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IncidenceMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, i64)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.retain(|&(_, v)| v != 0);
                r.sort_unstable_by_key(|&(c, _)| c);
                r
            })
            .collect::<Vec<_>>();
        IncidenceMatrix { nrows: rows.len(), ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[(usize, i64)] {
        &self.rows[r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(usize, i64)]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|k| self.rows[r][k].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn transpose(&self) -> IncidenceMatrix {
        let mut rows = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                rows[c].push((r, v));
            }
        }
        IncidenceMatrix { nrows: self.ncols, ncols: self.nrows, rows }
    }

    /// Exact product `self * rhs`.
    pub fn mul(&self, rhs: &IncidenceMatrix) -> IncidenceMatrix {
        assert_eq!(self.ncols, rhs.nrows, "incidence product shape mismatch");
        let mut acc = vec![0i64; rhs.ncols];
        let mut touched = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, a) in row {
                    for &(c, b) in &rhs.rows[k] {
                        if acc[c] == 0 {
                            touched.push(c);
                        }
                        acc[c] += a * b;
                    }
                }
                let mut out: Vec<(usize, i64)> =
                    touched.drain(..).map(|c| (c, std::mem::take(&mut acc[c]))).collect();
                out.retain(|&(_, v)| v != 0);
                out.sort_unstable_by_key(|&(c, _)| c);
                out.dedup_by_key(|e| e.0);
                out
            })
            .collect();
        IncidenceMatrix { nrows: self.nrows, ncols: rhs.ncols, rows }
    }

    pub fn to_dense<T: Real>(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] = T::lit(v as f64);
            }
        }
        m
    }
}

/// `D_n`: entry `(σ, τ) = κ(σ, τ)` for `σ ∈ X_{n+1}`, `τ ∈ X_n`.
///
/// Dimensions without cells give zero-size matrices.
pub fn coboundary_matrix(complex: &ComplexIndex, n: isize) -> IncidenceMatrix {
    let nrows = complex.cell_count(n + 1);
    let ncols = complex.cell_count(n);
    if nrows == 0 || ncols == 0 {
        return IncidenceMatrix::zeros(nrows, ncols);
    }
    let rows = (0..nrows).map(|r| complex.boundary(n + 1, r)).collect();
    IncidenceMatrix { nrows, ncols, rows }
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::laplacian::LaplacianBundle;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative gap separating distinct eigenvalue clusters.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Largest operator handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;

/// Which part of the Laplacian an eigenvalue cluster comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attribution {
    Up,
    Down,
    Both,
    Harmonic,
}

impl Attribution {
    pub fn name(self) -> &'static str {
        match self {
            Attribution::Up => "up",
            Attribution::Down => "down",
            Attribution::Both => "both",
            Attribution::Harmonic => "harmonic",
        }
    }
}

/// A run of numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T: Real> {
    /// Mean of the member eigenvalues.
    pub eigenvalue: T,
    pub multiplicity: usize,
    pub attribution: Attribution,
    /// Rounded squared mass of the eigenvectors in the coexact space.
    pub up_multiplicity: usize,
    /// Rounded squared mass of the eigenvectors in the exact space.
    pub down_multiplicity: usize,
    /// Column range of the cluster in [`SpectrumReport::eigenvectors`].
    pub start: usize,
}

impl<T: Real> Cluster<T> {
    pub fn columns(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.multiplicity
    }
}

/// Eigen-decomposition of one Laplacian.
///
/// Eigenvalues ascend. Eigenvectors are columns in the `e_σ` basis with unit
/// weighted norm; inside each cluster they form a canonical orthonormal
/// basis, so the output does not depend on the solver's rotation of
/// degenerate eigenspaces.
#[derive(Debug, Clone)]
pub struct SpectrumReport<T: Real> {
    pub dim: isize,
    pub eigenvalues: Vec<T>,
    pub eigenvectors: DMatrix<T>,
    pub clusters: Vec<Cluster<T>>,
    pub betti: usize,
}

impl<T: Real> SpectrumReport<T> {
    pub fn harmonic_cluster(&self) -> Option<&Cluster<T>> {
        self.clusters.first().filter(|c| c.attribution == Attribution::Harmonic)
    }

    pub fn min_eigenvalue(&self) -> Option<T> {
        self.eigenvalues.first().copied()
    }

    pub fn eigenvector(&self, k: usize) -> DVector<T> {
        self.eigenvectors.column(k).into_owned()
    }
}

fn symmetric_part<T: Real>(s: &DMatrix<T>) -> DMatrix<T> {
    (s + s.transpose()) * T::lit(0.5)
}

/// Ascending eigenvalues of a symmetric matrix (its symmetric part is used).
pub fn sorted_eigenvalues<T: Real>(s: &DMatrix<T>) -> Result<Vec<T>> {
    if s.nrows() > DENSE_LIMIT {
        return Err(Error::TooLarge { size: s.nrows(), limit: DENSE_LIMIT });
    }
    if s.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<T> = SymmetricEigen::new(symmetric_part(s)).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(values)
}

/// Splits ascending values into runs whose consecutive gaps stay within
/// `tol * max(1, max|λ|)`. Returns the start index of each run.
pub fn cluster_starts<T: Real>(values: &[T], tol: f64) -> Vec<usize> {
    if values.is_empty() {
        return Vec::new();
    }
    let scale = values.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let gap = T::lit(tol) * scale;
    let mut starts = vec![0];
    for k in 1..values.len() {
        if values[k] - values[k - 1] > gap {
            starts.push(k);
        }
    }
    starts
}

/// Orthonormal basis of span(U) chosen from U's row structure alone.
///
/// Row `i` of `U` is the coordinate vector of `P e_i` for the projector
/// `P = U Uᵀ`. Greedy Gram–Schmidt over those rows (lowest index among the
/// rows within half of the largest residual) depends only on `P`.
fn canonical_basis<T: Real>(u: &DMatrix<T>) -> DMatrix<T> {
    let k = u.ncols();
    if k == 0 {
        return u.clone();
    }
    let mut rows: Vec<DVector<T>> = u.row_iter().map(|r| r.transpose()).collect();
    let mut q: Vec<DVector<T>> = Vec::with_capacity(k);
    let half = T::lit(0.5);
    for _ in 0..k {
        let norms: Vec<T> = rows.iter().map(|r| r.norm()).collect();
        let best = norms.iter().fold(T::zero(), |acc, &v| acc.max(v));
        let pick = norms.iter().position(|&v| v >= half * best).expect("nonempty");
        let mut v = rows[pick].clone();
        for b in &q {
            let proj = b.dot(&v);
            v.axpy(-proj, b, T::one());
        }
        v /= v.norm();
        for r in rows.iter_mut() {
            let proj = v.dot(r);
            r.axpy(-proj, &v, T::one());
        }
        q.push(v);
    }
    u * DMatrix::from_columns(&q)
}

/// Eigen-decomposition of `bundle.full` through its symmetrized form.
///
/// Attribution uses that an eigenvector `u` of `S` with `λ > 0` has coexact
/// component `S_up u / λ` and exact component `S_down u / λ`.
pub fn spectrum<T: Real>(bundle: &LaplacianBundle<T>, cluster_tol: f64) -> Result<SpectrumReport<T>> {
    let size = bundle.size();
    if size > DENSE_LIMIT {
        return Err(Error::TooLarge { size, limit: DENSE_LIMIT });
    }
    if size == 0 {
        return Ok(SpectrumReport {
            dim: bundle.dim,
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
            clusters: Vec::new(),
            betti: 0,
        });
    }
    let eig = SymmetricEigen::new(symmetric_part(&bundle.symmetric));
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite eigenvalues")
    });
    let eigenvalues: Vec<T> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let sorted_vectors: Vec<DVector<T>> =
        order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    let u = DMatrix::from_columns(&sorted_vectors);

    let sqrt_w: Vec<T> = bundle.weights.iter().map(|w| w.sqrt()).collect();
    let s_up = bundle.symmetric_up();
    let s_down = bundle.symmetric_down();

    let starts = cluster_starts(&eigenvalues, cluster_tol);
    let scale = eigenvalues.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let zero_gap = T::lit(cluster_tol) * scale;
    let mut canonical = DMatrix::zeros(size, size);
    let mut clusters = Vec::with_capacity(starts.len());
    for (c, &start) in starts.iter().enumerate() {
        let end = starts.get(c + 1).copied().unwrap_or(size);
        let block = canonical_basis(&u.columns(start, end - start).into_owned());
        canonical.columns_mut(start, end - start).copy_from(&block);
        let count = T::count(end - start);
        let mean = eigenvalues[start..end].iter().fold(T::zero(), |acc, &v| acc + v) / count;
        let harmonic = eigenvalues[start..end].iter().all(|v| v.abs() <= zero_gap);
        let (mut up_mass, mut down_mass) = (T::zero(), T::zero());
        if !harmonic {
            for k in 0..block.ncols() {
                let col = block.column(k);
                up_mass += (&s_up * col).norm_squared() / (mean * mean);
                down_mass += (&s_down * col).norm_squared() / (mean * mean);
            }
        }
        let half = T::lit(0.5);
        let attribution = if harmonic {
            Attribution::Harmonic
        } else if down_mass < half {
            Attribution::Up
        } else if up_mass < half {
            Attribution::Down
        } else {
            Attribution::Both
        };
        clusters.push(Cluster {
            eigenvalue: mean,
            multiplicity: end - start,
            attribution,
            up_multiplicity: up_mass.as_f64().round() as usize,
            down_multiplicity: down_mass.as_f64().round() as usize,
            start,
        });
    }
    let eigenvectors =
        DMatrix::from_fn(size, size, |i, j| canonical[(i, j)] / sqrt_w[i]);
    let betti = clusters
        .first()
        .filter(|c| c.attribution == Attribution::Harmonic)
        .map_or(0, |c| c.multiplicity);
    Ok(SpectrumReport { dim: bundle.dim, eigenvalues, eigenvectors, clusters, betti })
}

impl<T: Real> LaplacianBundle<T> {
    /// `W^{1/2} L_up W^{-1/2}`.
    pub fn symmetric_up(&self) -> DMatrix<T> {
        self.similar(&self.up)
    }

    /// `W^{1/2} L_down W^{-1/2}`.
    pub fn symmetric_down(&self) -> DMatrix<T> {
        self.similar(&self.down)
    }

    fn similar(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let sqrt_w: Vec<T> = self.weights.iter().map(|w| w.sqrt()).collect();
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * sqrt_w[i] / sqrt_w[j])
    }
}

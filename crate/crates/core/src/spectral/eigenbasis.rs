use nalgebra::{DMatrix, DVector};

use crate::complex::{Cell, CellKind, ComplexIndex, ComplexKind, VertexId};
use crate::error::{Error, Result};
use crate::hodge::Cochain;
use crate::scalar::Real;
use crate::weights::{IndependentModel, ModelFlavor};

/// `(u ⊗ v)(σ) = u(σ[0..=k]) · v(σ[k+1..])` for `u ∈ C^k`, `v ∈ C^l`.
///
/// With leftmost-significant indexing this is the Kronecker product of the
/// coefficient vectors.
pub fn tensor_product<T: Real>(
    complex: &ComplexIndex,
    u: &Cochain<T>,
    v: &Cochain<T>,
) -> Result<Cochain<T>> {
    if complex.kind() != ComplexKind::FullSequence {
        return Err(Error::InvalidInput("tensor product needs a full sequence complex".into()));
    }
    if u.dim < 0 || v.dim < 0 {
        return Err(Error::InvalidInput("tensor factors must have dimension >= 0".into()));
    }
    let dim = u.dim + v.dim + 1;
    if dim > complex.max_dim() {
        return Err(Error::Truncation { dim, max_dim: complex.max_dim() });
    }
    for c in [u, v] {
        if c.len() != complex.cell_count(c.dim) {
            return Err(Error::DimensionMismatch {
                expected: complex.cell_count(c.dim),
                found: c.len(),
            });
        }
    }
    Ok(Cochain::new(dim, u.values.kronecker(&v.values)))
}

/// Eigenvector of the independent sequence Laplacian labeled by a sequence.
#[derive(Debug, Clone)]
pub struct LabeledEigenvector<T: Real> {
    pub label: Cell,
    /// Number of slots of the label holding the base vertex.
    pub a_count: usize,
    /// `dim + 2 - a_count`.
    pub eigenvalue: usize,
    pub coefficients: Cochain<T>,
}

/// Per-vertex 0-cochains `f₀(x)` relative to a base vertex `a`:
/// `f₀(a)` is constant one, and for `x ≠ a`, `f₀(x) = w(x) e_a - w(a) e_x`.
#[derive(Debug, Clone)]
pub struct EigenbasisGenerator<T: Real> {
    base_vertex: VertexId,
    model: IndependentModel<T>,
    f0: Vec<DVector<T>>,
}

impl<T: Real> EigenbasisGenerator<T> {
    pub fn new(model: &IndependentModel<T>, base_vertex: VertexId) -> Result<Self> {
        if model.flavor() != ModelFlavor::Sequence {
            return Err(Error::Precondition(
                "eigenbasis needs an independent sequence model".into(),
            ));
        }
        let m = model.vertex_count();
        if base_vertex >= m {
            return Err(Error::VertexOutOfRange { vertex: base_vertex, vertex_count: m });
        }
        let w = model.vertex_weights();
        let f0 = (0..m)
            .map(|x| {
                if x == base_vertex {
                    DVector::from_element(m, T::one())
                } else {
                    let mut f = DVector::zeros(m);
                    f[base_vertex] = w[x];
                    f[x] = -w[base_vertex];
                    f
                }
            })
            .collect();
        Ok(EigenbasisGenerator { base_vertex, model: model.clone(), f0 })
    }

    pub fn base_vertex(&self) -> VertexId {
        self.base_vertex
    }

    pub fn model(&self) -> &IndependentModel<T> {
        &self.model
    }

    pub fn f0(&self, x: VertexId) -> &DVector<T> {
        &self.f0[x]
    }

    fn check_complex(&self, complex: &ComplexIndex) -> Result<()> {
        if complex.kind() != ComplexKind::FullSequence {
            return Err(Error::InvalidInput("eigenbasis needs a full sequence complex".into()));
        }
        if complex.vertex_count() != self.model.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: complex.vertex_count(),
                found: self.model.vertex_count(),
            });
        }
        Ok(())
    }

    /// `f(η) = f₀(η_0) ⊗ … ⊗ f₀(η_n)`, one factor per slot of `η`.
    pub fn f_eta(&self, complex: &ComplexIndex, eta: &Cell) -> Result<LabeledEigenvector<T>> {
        self.check_complex(complex)?;
        if eta.kind() != CellKind::Sequence {
            return Err(Error::WrongCellKind { expected: "sequence", found: "non-sequence" });
        }
        let dim = eta.dim();
        if dim > complex.max_dim() {
            return Err(Error::Truncation { dim, max_dim: complex.max_dim() });
        }
        if let Some(&v) = eta.vertices().iter().find(|&&v| v >= complex.vertex_count()) {
            return Err(Error::VertexOutOfRange { vertex: v, vertex_count: complex.vertex_count() });
        }
        let mut values = DVector::from_element(1, T::one());
        for &x in eta.vertices() {
            values = values.kronecker(&self.f0[x]);
        }
        let a_count = eta.vertices().iter().filter(|&&v| v == self.base_vertex).count();
        Ok(LabeledEigenvector {
            label: eta.clone(),
            a_count,
            eigenvalue: eta.len() + 1 - a_count,
            coefficients: Cochain::new(dim, values),
        })
    }

    /// `f(η)` for every `η` of dimension `n`, in index order.
    pub fn eigenbasis(&self, complex: &ComplexIndex, n: isize) -> Result<Vec<LabeledEigenvector<T>>> {
        self.check_complex(complex)?;
        if n < 0 {
            return Err(Error::InvalidInput("eigenbasis needs n >= 0".into()));
        }
        if n > complex.max_dim() {
            return Err(Error::Truncation { dim: n, max_dim: complex.max_dim() });
        }
        complex.cells(n).map(|eta| self.f_eta(complex, &eta)).collect()
    }
}

/// Columns `f(η)` side by side.
pub fn basis_matrix<T: Real>(vectors: &[LabeledEigenvector<T>]) -> DMatrix<T> {
    let cols: Vec<DVector<T>> = vectors.iter().map(|v| v.coefficients.values.clone()).collect();
    if cols.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    DMatrix::from_columns(&cols)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `(λ, mult)` for `λ = 1..=n+2` with `mult = C(n+1, λ-1) (m-1)^{λ-1}`.
/// Values with zero multiplicity (only when `m = 1`) are omitted.
pub fn predicted_spectrum(n: usize, m: usize) -> Vec<(usize, u128)> {
    (1..=n + 2)
        .map(|lambda| {
            let k = lambda - 1;
            (lambda, binomial(n + 1, k) * ((m as u128).saturating_sub(1)).pow(k as u32))
        })
        .filter(|&(_, mult)| mult > 0)
        .collect()
}

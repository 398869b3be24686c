//! Closed-form Laplacian entries, assembled cell by cell without forming
//! coboundary products. Each routine must agree with [`super::laplacian`].

use nalgebra::DMatrix;

use super::laplacian::require_laplacian_dim;
use crate::complex::{ComplexIndex, ComplexKind, VertexId};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weights::{check_layout, IndependentModel, ModelFlavor, WeightFunction};

fn glued(v: &[VertexId], i: usize, a: VertexId) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(v.len() + 1);
    out.extend_from_slice(&v[..i]);
    out.push(a);
    out.extend_from_slice(&v[i..]);
    out
}

fn removed(v: &[VertexId], i: usize) -> Vec<VertexId> {
    let mut out = v.to_vec();
    out.remove(i);
    out
}

fn swapped_at(v: &[VertexId], i: usize, a: VertexId) -> Vec<VertexId> {
    let mut out = v.to_vec();
    out[i] = a;
    out
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn require_sequence(complex: &ComplexIndex) -> Result<()> {
    if complex.kind() != ComplexKind::FullSequence {
        return Err(Error::InvalidInput("operation requires a full sequence complex".into()));
    }
    Ok(())
}

/// Laplacian of a full sequence complex from its glue/remove/swap expansion.
///
/// Column `σ` (length `n + 1`) collects
/// * `Σ_{i≤n+1} Σ_a w(glue(σ,i,a)) / w(σ)` on `e_σ`,
/// * `-[w(glue(σ,i,a)) + w(glue(σ,i+1,a))] / w(swap(σ,i,a)) + w(σ)/w(σ\i)`
///   on `e_{swap(σ,i,a)}` for every slot `i ≤ n` and vertex `a`,
/// * `(-1)^{i+j} [w(σ)/w(σ\j) - w(up)/w(glue(σ\j,i,a))]` on
///   `e_{glue(σ\j,i,a)}` for `i ≠ j`, where `up = glue(σ,i+1,a)` if `j < i`
///   and `up = glue(σ,i,a)` if `j > i`.
///
/// Terms through `σ\j` vanish when that face is absent (dimension 0 of a
/// non-augmented complex).
pub fn sequence_laplacian_direct<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    n: isize,
) -> Result<DMatrix<T>> {
    require_sequence(complex)?;
    require_laplacian_dim(complex, n)?;
    check_layout(complex, w)?;
    let m = complex.vertex_count();
    let size = complex.cell_count(n);
    let has_lower = n > complex.min_dim();
    let wt = |v: &[VertexId]| w.sequence_weight(complex, v);
    let idx = |v: &[VertexId]| complex.sequence_index(v);
    let mut l = DMatrix::zeros(size, size);
    let len = (n + 1) as usize;

    for col in 0..size {
        let sigma = complex.cell(n, col);
        let s = sigma.vertices();
        let ws = wt(s);

        let mut diag = T::zero();
        for i in 0..=len {
            for a in 0..m {
                diag += wt(&glued(s, i, a)) / ws;
            }
        }
        l[(col, col)] += diag;

        for i in 0..len {
            let lower_ratio = if has_lower { ws / wt(&removed(s, i)) } else { T::zero() };
            for a in 0..m {
                let target = swapped_at(s, i, a);
                let wtarget = wt(&target);
                let up = (wt(&glued(s, i, a)) + wt(&glued(s, i + 1, a))) / wtarget;
                l[(idx(&target), col)] += lower_ratio - up;
            }
        }

        for j in 0..len {
            let face = removed(s, j);
            let lower_ratio = if has_lower { ws / wt(&face) } else { T::zero() };
            for i in (0..len).filter(|&i| i != j) {
                let sgn = T::lit(sign(i + j) as f64);
                for a in 0..m {
                    let target = glued(&face, i, a);
                    let upper = if j < i { glued(s, i + 1, a) } else { glued(s, i, a) };
                    let value = lower_ratio - wt(&upper) / wt(&target);
                    l[(idx(&target), col)] += sgn * value;
                }
            }
        }
    }
    Ok(l)
}

/// Laplacian of the independent sequence model: `(n+2) - Σ_i w(σ_i)` on the
/// diagonal and `-w(σ_j)` at every sequence that differs from `σ` in slot
/// `j` only.
pub fn independent_sequence_laplacian_direct<T: Real>(
    complex: &ComplexIndex,
    model: &IndependentModel<T>,
    n: isize,
) -> Result<DMatrix<T>> {
    require_sequence(complex)?;
    require_laplacian_dim(complex, n)?;
    if model.flavor() != ModelFlavor::Sequence {
        return Err(Error::Model("sequence Laplacian needs a sequence-flavor model".into()));
    }
    if model.vertex_count() != complex.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: complex.vertex_count(),
            found: model.vertex_count(),
        });
    }
    if !complex.is_augmented() {
        return Err(Error::Precondition(
            "closed form assumes the augmented complex".into(),
        ));
    }
    let wv = model.vertex_weights();
    let m = complex.vertex_count();
    let size = complex.cell_count(n);
    let mut l = DMatrix::zeros(size, size);
    let top = T::count((n + 2) as usize);
    for col in 0..size {
        let sigma = complex.cell(n, col);
        let s = sigma.vertices();
        l[(col, col)] = s.iter().fold(top, |acc, &v| acc - wv[v]);
        for (j, &sj) in s.iter().enumerate() {
            for a in (0..m).filter(|&a| a != sj) {
                let row = complex.sequence_index(&swapped_at(s, j, a));
                l[(row, col)] -= wv[sj];
            }
        }
    }
    Ok(l)
}

/// Laplacian of an arbitrary simplicial complex from its degree ratios.
///
/// Column `ξ` has diagonal `Σ_{i∉ξ, ξ∪i∈K} w(ξ∪i)/w(ξ) + Σ_k w(ξ)/w(ξ\i_k)`
/// and, for each `τ = (ξ\i_k) ∪ i` in `K`, the entry
/// `(-1)^k κ(τ, ξ\i_k) [w(ξ)/w(ξ\i_k) - [ξ∪i ∈ K] w(ξ∪i)/w(τ)]`.
pub fn simplicial_laplacian_direct<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    n: isize,
) -> Result<DMatrix<T>> {
    if complex.kind() != ComplexKind::Simplicial {
        return Err(Error::InvalidInput("operation requires a simplicial complex".into()));
    }
    require_laplacian_dim(complex, n)?;
    check_layout(complex, w)?;
    let m = complex.vertex_count();
    let size = complex.cell_count(n);
    let has_lower = n > complex.min_dim();
    let weight = |c: &crate::complex::Cell| w.get(complex, c);
    let mut l = DMatrix::zeros(size, size);

    for col in 0..size {
        let xi = complex.cell(n, col);
        let wx = w.value(n, col);
        let outside: Vec<VertexId> =
            (0..m).filter(|v| xi.vertices().binary_search(v).is_err()).collect();

        let mut diag = T::zero();
        for &i in &outside {
            if let Some(wu) = weight(&with_vertex(&xi, i)) {
                diag += wu / wx;
            }
        }
        for k in 0..xi.len() {
            let face = xi.face(k);
            let lower_ratio = if has_lower {
                wx / weight(&face).expect("faces of stored cells are stored")
            } else {
                T::zero()
            };
            diag += lower_ratio;
            for &i in &outside {
                let tau = with_vertex(&face, i);
                let Some(row) = complex.index_of(&tau) else { continue };
                let wt = w.value(n, row);
                let upper = weight(&with_vertex(&xi, i)).map_or(T::zero(), |wu| wu / wt);
                let kappa = sign(k) * complex.incidence(&tau, &face);
                l[(row, col)] += T::lit(kappa as f64) * (lower_ratio - upper);
            }
        }
        l[(col, col)] += diag;
    }
    Ok(l)
}

fn with_vertex(cell: &crate::complex::Cell, v: VertexId) -> crate::complex::Cell {
    let mut vertices = cell.vertices().to_vec();
    vertices.push(v);
    crate::complex::Cell::simplex(vertices).expect("vertex not already present")
}

/// Random-walk normalized graph Laplacian `A⁻¹(D - W)` of the 1-skeleton:
/// `A` holds vertex weights, `W` edge weights, `D` weighted degrees.
/// Higher-dimensional cells, if any, are ignored.
pub fn combinatorial_laplacian<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
) -> Result<DMatrix<T>> {
    if complex.kind() != ComplexKind::Simplicial {
        return Err(Error::InvalidInput("operation requires a simplicial complex".into()));
    }
    check_layout(complex, w)?;
    let size = complex.cell_count(0);
    let mut adjacency = DMatrix::zeros(size, size);
    for (e, edge) in complex.cells(1).enumerate() {
        let [u, v] = [edge.vertices()[0], edge.vertices()[1]];
        let iu = complex.index_of(&crate::complex::Cell::simplex(vec![u])?).expect("vertex");
        let iv = complex.index_of(&crate::complex::Cell::simplex(vec![v])?).expect("vertex");
        adjacency[(iu, iv)] = w.value(1, e);
        adjacency[(iv, iu)] = w.value(1, e);
    }
    let mut l = -adjacency.clone();
    for i in 0..size {
        let degree = adjacency.row(i).iter().fold(T::zero(), |acc, &x| acc + x);
        l[(i, i)] += degree;
        let inv = T::one() / w.value(0, i);
        l.row_mut(i).scale_mut(inv);
    }
    Ok(l)
}

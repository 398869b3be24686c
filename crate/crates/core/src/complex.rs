//! Sequence and simplicial complexes, their graded cell enumeration, signed
//! incidence, and the glue/remove/swap calculus on sequences.
//!
//! Vertices are dense ids `0..m`. Full sequence complexes are never stored
//! cell by cell: a sequence of length `n + 1` is its own base-`m` index with
//! the leftmost slot as the most significant digit. Simplicial complexes keep
//! an explicit sorted list per dimension.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Default per-dimension cell budget.
pub const DEFAULT_CELL_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Sequence,
    Simplex,
    Empty,
}

impl CellKind {
    fn name(self) -> &'static str {
        match self {
            CellKind::Sequence => "sequence",
            CellKind::Simplex => "simplex",
            CellKind::Empty => "empty",
        }
    }
}

/// A sequence (ordered, repeats allowed), a simplex (strictly increasing
/// vertex set), or the empty cell of dimension -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    kind: CellKindOrd,
    vertices: Vec<VertexId>,
}

// Separate ordering key so `Cell` can derive `Ord` without exposing it on
// `CellKind`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum CellKindOrd {
    Empty,
    Sequence,
    Simplex,
}

impl Cell {
    pub fn empty() -> Self {
        Cell { kind: CellKindOrd::Empty, vertices: Vec::new() }
    }

    /// A sequence cell. An empty vertex list yields the empty cell.
    pub fn sequence(vertices: Vec<VertexId>) -> Self {
        if vertices.is_empty() {
            return Cell::empty();
        }
        Cell { kind: CellKindOrd::Sequence, vertices }
    }

    /// A simplex from an arbitrary vertex list; vertices are sorted and
    /// duplicates rejected.
    pub fn simplex(mut vertices: Vec<VertexId>) -> Result<Self> {
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex { vertex: w[0] });
        }
        Ok(Self::simplex_sorted(vertices))
    }

    fn simplex_sorted(vertices: Vec<VertexId>) -> Self {
        if vertices.is_empty() {
            return Cell::empty();
        }
        Cell { kind: CellKindOrd::Simplex, vertices }
    }

    pub fn kind(&self) -> CellKind {
        match self.kind {
            CellKindOrd::Empty => CellKind::Empty,
            CellKindOrd::Sequence => CellKind::Sequence,
            CellKindOrd::Simplex => CellKind::Simplex,
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.vertices.len() as isize - 1
    }

    /// Removes the vertex at `position`, keeping the cell kind.
    pub fn face(&self, position: usize) -> Cell {
        let mut vertices = self.vertices.clone();
        vertices.remove(position);
        match self.kind {
            CellKindOrd::Simplex => Cell::simplex_sorted(vertices),
            _ => Cell::sequence(vertices),
        }
    }

    /// Renders the cell with external vertex names: `a.b.a`, `{a,b}`, `()`.
    pub fn display_with<'a, F>(&'a self, name: F) -> String
    where
        F: Fn(VertexId) -> &'a str,
    {
        match self.kind {
            CellKindOrd::Empty => "()".to_string(),
            CellKindOrd::Sequence => {
                self.vertices.iter().map(|&v| name(v)).collect::<Vec<_>>().join(".")
            }
            CellKindOrd::Simplex => format!(
                "{{{}}}",
                self.vertices.iter().map(|&v| name(v)).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        match self.kind {
            CellKindOrd::Empty => write!(f, "()"),
            CellKindOrd::Sequence => write!(f, "{}", ids.join(".")),
            CellKindOrd::Simplex => write!(f, "{{{}}}", ids.join(",")),
        }
    }
}

fn as_sequence(cell: &Cell) -> Result<&[VertexId]> {
    match cell.kind() {
        CellKind::Sequence | CellKind::Empty => Ok(cell.vertices()),
        other => Err(Error::WrongCellKind { expected: "sequence", found: other.name() }),
    }
}

/// Inserts vertex `a` at slot `i` (`0 <= i <= len`).
pub fn glue(sigma: &Cell, i: usize, a: VertexId) -> Result<Cell> {
    let v = as_sequence(sigma)?;
    if i > v.len() {
        return Err(Error::PositionOutOfRange { position: i, len: v.len() });
    }
    let mut out = Vec::with_capacity(v.len() + 1);
    out.extend_from_slice(&v[..i]);
    out.push(a);
    out.extend_from_slice(&v[i..]);
    Ok(Cell::sequence(out))
}

/// Deletes slot `i` (`0 <= i < len`).
pub fn remove(sigma: &Cell, i: usize) -> Result<Cell> {
    let v = as_sequence(sigma)?;
    if i >= v.len() {
        return Err(Error::PositionOutOfRange { position: i, len: v.len() });
    }
    Ok(sigma.face(i))
}

/// Replaces slot `i` by vertex `a`.
pub fn swap(sigma: &Cell, i: usize, a: VertexId) -> Result<Cell> {
    let v = as_sequence(sigma)?;
    if i >= v.len() {
        return Err(Error::PositionOutOfRange { position: i, len: v.len() });
    }
    let mut out = v.to_vec();
    out[i] = a;
    Ok(Cell::sequence(out))
}

/// True iff the sequences have equal length and differ in at most one slot.
pub fn swapped(sigma: &Cell, tau: &Cell) -> bool {
    sigma.len() == tau.len()
        && sigma.vertices().iter().zip(tau.vertices()).filter(|(a, b)| a != b).count() <= 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexKind {
    FullSequence,
    Simplicial,
}

#[derive(Debug, Clone)]
enum Storage {
    /// `powers[k] = m^k` for `k = 0..=top_dim + 1`.
    FullSequence { powers: Vec<usize> },
    Simplicial {
        /// `cells[dim + 1]` sorted lexicographically.
        cells: Vec<Vec<Vec<VertexId>>>,
        lookup: HashMap<Vec<VertexId>, usize>,
    },
}

/// Graded enumeration of the cells of a complex with a dense index per
/// dimension. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ComplexIndex {
    vertex_count: usize,
    max_dim: isize,
    top_dim: isize,
    augmented: bool,
    storage: Storage,
}

fn checked_count(m: usize, len: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..len {
        acc = acc.checked_mul(m)?;
    }
    Some(acc)
}

impl ComplexIndex {
    /// Full sequence complex on `vertex_count` vertices. Cells are
    /// materialized through dimension `max_dim + 1` so Laplacians up to
    /// `max_dim` see their complete coboundary.
    pub fn full_sequence(vertex_count: usize, max_dim: isize) -> Result<Self> {
        Self::full_sequence_with_budget(vertex_count, max_dim, DEFAULT_CELL_BUDGET)
    }

    pub fn full_sequence_with_budget(
        vertex_count: usize,
        max_dim: isize,
        budget: usize,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidInput("vertex_count must be positive".into()));
        }
        if max_dim < -1 {
            return Err(Error::InvalidInput(format!("max_dim must be >= -1, got {max_dim}")));
        }
        let top_dim = max_dim + 1;
        let top_len = (top_dim + 1) as usize;
        match checked_count(vertex_count, top_len) {
            Some(c) if c <= budget => {}
            other => {
                let count = other
                    .map(|c| c as u128)
                    .unwrap_or_else(|| (vertex_count as u128).saturating_pow(top_len as u32));
                return Err(Error::BudgetExceeded { dim: top_dim, count, budget });
            }
        }
        let powers = (0..=top_len).map(|k| checked_count(vertex_count, k).unwrap_or(0)).collect();
        Ok(ComplexIndex {
            vertex_count,
            max_dim,
            top_dim,
            augmented: true,
            storage: Storage::FullSequence { powers },
        })
    }

    /// Downward closure of `facets` (including the empty cell).
    pub fn simplicial(vertex_count: usize, facets: &[Vec<VertexId>]) -> Result<Self> {
        Self::simplicial_with_budget(vertex_count, facets, DEFAULT_CELL_BUDGET)
    }

    pub fn simplicial_with_budget(
        vertex_count: usize,
        facets: &[Vec<VertexId>],
        budget: usize,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidInput("vertex_count must be positive".into()));
        }
        let mut by_dim: Vec<BTreeSet<Vec<VertexId>>> = vec![BTreeSet::new()];
        by_dim[0].insert(Vec::new());
        for facet in facets {
            if let Some(&v) = facet.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::VertexOutOfRange { vertex: v, vertex_count });
            }
            let cell = Cell::simplex(facet.clone())?;
            let slot = cell.len();
            while by_dim.len() <= slot {
                by_dim.push(BTreeSet::new());
            }
            by_dim[slot].insert(cell.vertices().to_vec());
        }
        // Close downward one layer at a time, largest first.
        for len in (1..by_dim.len()).rev() {
            let layer: Vec<Vec<VertexId>> = by_dim[len].iter().cloned().collect();
            for cell in layer {
                for j in 0..cell.len() {
                    let mut face = cell.clone();
                    face.remove(j);
                    by_dim[len - 1].insert(face);
                }
                if by_dim[len - 1].len() > budget {
                    return Err(Error::BudgetExceeded {
                        dim: len as isize - 2,
                        count: by_dim[len - 1].len() as u128,
                        budget,
                    });
                }
            }
            if by_dim[len].len() > budget {
                return Err(Error::BudgetExceeded {
                    dim: len as isize - 1,
                    count: by_dim[len].len() as u128,
                    budget,
                });
            }
        }
        let cells: Vec<Vec<Vec<VertexId>>> =
            by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut lookup = HashMap::new();
        for layer in &cells {
            for (i, c) in layer.iter().enumerate() {
                lookup.insert(c.clone(), i);
            }
        }
        let top_dim = cells.len() as isize - 2;
        Ok(ComplexIndex {
            vertex_count,
            max_dim: top_dim,
            top_dim,
            augmented: true,
            storage: Storage::Simplicial { cells, lookup },
        })
    }

    /// The full simplex `2^[m]`.
    pub fn full_simplex(vertex_count: usize) -> Result<Self> {
        let facet: Vec<VertexId> = (0..vertex_count).collect();
        Self::simplicial(vertex_count, &[facet])
    }

    /// Drops the empty cell (dimension -1) from the grading.
    pub fn without_augmentation(mut self) -> Self {
        self.augmented = false;
        self
    }

    /// Truncates a simplicial complex to its `k`-skeleton.
    pub fn skeleton(mut self, k: isize) -> Self {
        if let Storage::Simplicial { cells, lookup } = &mut self.storage {
            let keep = (k + 2).max(1) as usize;
            if cells.len() > keep {
                for layer in cells.drain(keep..) {
                    for c in layer {
                        lookup.remove(&c);
                    }
                }
            }
            self.top_dim = cells.len() as isize - 2;
            self.max_dim = self.top_dim;
        }
        self
    }

    pub fn kind(&self) -> ComplexKind {
        match self.storage {
            Storage::FullSequence { .. } => ComplexKind::FullSequence,
            Storage::Simplicial { .. } => ComplexKind::Simplicial,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Largest dimension whose Laplacian is complete.
    pub fn max_dim(&self) -> isize {
        self.max_dim
    }

    /// Largest dimension with materialized cells.
    pub fn top_dim(&self) -> isize {
        self.top_dim
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn min_dim(&self) -> isize {
        if self.augmented {
            -1
        } else {
            0
        }
    }

    pub fn dims(&self) -> RangeInclusive<isize> {
        self.min_dim()..=self.top_dim
    }

    /// True when dimension `dim` holds no cells because of truncation rather
    /// than because the complex genuinely ends.
    pub fn is_truncated_above(&self, dim: isize) -> bool {
        self.kind() == ComplexKind::FullSequence && dim >= self.top_dim
    }

    pub fn cell_count(&self, dim: isize) -> usize {
        if dim < self.min_dim() || dim > self.top_dim {
            return 0;
        }
        match &self.storage {
            Storage::FullSequence { powers } => powers[(dim + 1) as usize],
            Storage::Simplicial { cells, .. } => cells[(dim + 1) as usize].len(),
        }
    }

    pub fn counts(&self) -> Vec<(isize, usize)> {
        self.dims().map(|d| (d, self.cell_count(d))).collect()
    }

    /// The cell at `index` in dimension `dim`. Panics when out of range.
    pub fn cell(&self, dim: isize, index: usize) -> Cell {
        assert!(index < self.cell_count(dim), "cell index {index} out of range in dim {dim}");
        match &self.storage {
            Storage::FullSequence { .. } => {
                let len = (dim + 1) as usize;
                let m = self.vertex_count;
                let mut digits = vec![0; len];
                let mut rest = index;
                for slot in (0..len).rev() {
                    digits[slot] = rest % m;
                    rest /= m;
                }
                Cell::sequence(digits)
            }
            Storage::Simplicial { cells, .. } => {
                Cell::simplex_sorted(cells[(dim + 1) as usize][index].clone())
            }
        }
    }

    /// Index of a sequence given as a raw vertex slice (full sequence only).
    pub(crate) fn sequence_index(&self, vertices: &[VertexId]) -> usize {
        vertices.iter().fold(0, |acc, &v| acc * self.vertex_count + v)
    }

    /// Dense index of `cell` within its dimension, if the cell belongs here.
    pub fn index_of(&self, cell: &Cell) -> Option<usize> {
        let dim = cell.dim();
        if dim < self.min_dim() || dim > self.top_dim {
            return None;
        }
        if cell.vertices().iter().any(|&v| v >= self.vertex_count) {
            return None;
        }
        match (&self.storage, cell.kind()) {
            (_, CellKind::Empty) => Some(0),
            (Storage::FullSequence { .. }, CellKind::Sequence) => {
                Some(self.sequence_index(cell.vertices()))
            }
            (Storage::Simplicial { lookup, .. }, CellKind::Simplex) => {
                lookup.get(cell.vertices()).copied()
            }
            _ => None,
        }
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.index_of(cell).is_some()
    }

    pub fn cells(&self, dim: isize) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cell_count(dim)).map(move |i| self.cell(dim, i))
    }

    /// Signed incidence κ(upper, lower).
    ///
    /// Zero unless `lower` is a codimension-one face of `upper`. For
    /// sequences the value sums `(-1)^i` over every removal position `i`
    /// that produces `lower`, so it can cancel to zero or exceed one in
    /// magnitude.
    pub fn incidence(&self, upper: &Cell, lower: &Cell) -> i64 {
        if upper.len() != lower.len() + 1 {
            return 0;
        }
        if lower.kind() == CellKind::Empty {
            return 1;
        }
        match self.kind() {
            ComplexKind::FullSequence => {
                let (u, l) = (upper.vertices(), lower.vertices());
                (0..u.len())
                    .filter(|&i| u[..i] == l[..i] && u[i + 1..] == l[i..])
                    .map(|i| if i % 2 == 0 { 1 } else { -1 })
                    .sum()
            }
            ComplexKind::Simplicial => {
                let (u, l) = (upper.vertices(), lower.vertices());
                // First slot where the sorted lists disagree is the removed one.
                let j = (0..l.len()).find(|&j| u[j] != l[j]).unwrap_or(l.len());
                if u[..j] == l[..j] && u[j + 1..] == l[j..] {
                    if j % 2 == 0 {
                        1
                    } else {
                        -1
                    }
                } else {
                    0
                }
            }
        }
    }

    /// Nonzero `(face index, κ)` pairs of a cell of dimension `dim`, with
    /// repeated faces already merged.
    pub fn boundary(&self, dim: isize, index: usize) -> Vec<(usize, i64)> {
        if dim - 1 < self.min_dim() {
            return Vec::new();
        }
        let cell = self.cell(dim, index);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(cell.len());
        for i in 0..cell.len() {
            let face = cell.face(i);
            let j = self.index_of(&face).expect("complex closed under faces");
            let sign = if i % 2 == 0 { 1 } else { -1 };
            match out.iter_mut().find(|(k, _)| *k == j) {
                Some(entry) => entry.1 += sign,
                None => out.push((j, sign)),
            }
        }
        out.retain(|&(_, v)| v != 0);
        out.sort_unstable_by_key(|&(j, _)| j);
        out
    }

    /// Checks the abstract-cell-complex axioms against this complex's own
    /// incidence function.
    pub fn validate(&self) -> ValidationReport {
        validate_incidence(self, |u, l| self.incidence(u, l))
    }
}

/// One way a complex can fail the cell-complex axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A face of a stored cell is missing, or has the wrong dimension.
    NotClosed { cell: Cell, face: Cell },
    /// κ is nonzero on a pair that is not a codimension-one face relation.
    Support { upper: Cell, lower: Cell, value: i64 },
    /// Σ κ(ξ, ξ′) κ(ξ′, ξ″) is nonzero.
    Composition { upper: Cell, lower: Cell, sum: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub first_violation: Option<Violation>,
    pub pairs_checked: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn is_face(upper: &Cell, lower: &Cell) -> bool {
    if lower.len() + 1 != upper.len() {
        return false;
    }
    (0..upper.len()).any(|i| upper.face(i).vertices() == lower.vertices())
}

/// Validates closure, κ support and the κ-composition identity for an
/// arbitrary incidence oracle over the cells of `complex`.
///
/// The oracle is swept over every pair of cells whose dimensions differ by
/// at most two, so the cost is quadratic in the per-dimension cell counts.
pub fn validate_incidence<F>(complex: &ComplexIndex, kappa: F) -> ValidationReport
where
    F: Fn(&Cell, &Cell) -> i64,
{
    let mut pairs = 0usize;
    let fail = |v: Violation, pairs: usize| ValidationReport { first_violation: Some(v), pairs_checked: pairs };

    // Closure and dimension monotonicity along faces.
    for dim in complex.dims() {
        if dim - 1 < complex.min_dim() {
            continue;
        }
        for cell in complex.cells(dim) {
            for i in 0..cell.len() {
                let face = cell.face(i);
                pairs += 1;
                if !complex.contains(&face) || face.dim() != dim - 1 {
                    return fail(Violation::NotClosed { cell, face }, pairs);
                }
            }
        }
    }

    // Support: κ vanishes off codimension-one face pairs.
    let dims: Vec<isize> = complex.dims().collect();
    let mut tables: HashMap<isize, Vec<Vec<(usize, i64)>>> = HashMap::new();
    for &du in &dims {
        for &dl in &dims {
            if (du - dl).abs() > 2 {
                continue;
            }
            let lowers: Vec<Cell> = complex.cells(dl).collect();
            let mut rows = Vec::new();
            for upper in complex.cells(du) {
                let mut row = Vec::new();
                for (j, lower) in lowers.iter().enumerate() {
                    pairs += 1;
                    let value = kappa(&upper, lower);
                    if value == 0 {
                        continue;
                    }
                    if du != dl + 1 || !is_face(&upper, lower) {
                        return fail(
                            Violation::Support { upper, lower: lower.clone(), value },
                            pairs,
                        );
                    }
                    row.push((j, value));
                }
                rows.push(row);
            }
            if du == dl + 1 {
                tables.insert(du, rows);
            }
        }
    }

    // Composition: (D_{n} D_{n-1})[ξ, ξ″] = 0 for every pair two apart.
    for &du in &dims {
        let (Some(upper_rows), Some(mid_rows)) = (tables.get(&du), tables.get(&(du - 1))) else {
            continue;
        };
        let lower_count = complex.cell_count(du - 2);
        for (iu, row) in upper_rows.iter().enumerate() {
            let mut acc = vec![0i64; lower_count];
            for &(im, a) in row {
                for &(il, b) in &mid_rows[im] {
                    acc[il] += a * b;
                }
            }
            pairs += lower_count;
            if let Some((il, &sum)) = acc.iter().enumerate().find(|(_, &s)| s != 0) {
                return fail(
                    Violation::Composition {
                        upper: complex.cell(du, iu),
                        lower: complex.cell(du - 2, il),
                        sum,
                    },
                    pairs,
                );
            }
        }
    }

    ValidationReport { first_violation: None, pairs_checked: pairs }
}

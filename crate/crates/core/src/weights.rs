//! Weight functions on complexes: conditional weights from sequence
//! distributions, moment maps and empty-set normalization on simplicial
//! distributions, and independent vertices models.

use std::collections::BTreeMap;

use crate::complex::{Cell, CellKind, ComplexIndex, ComplexKind, VertexId};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default tolerance for normalization and factorization checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A probability distribution with finite support on cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    support: BTreeMap<Cell, T>,
}

impl<T: Real> Distribution<T> {
    /// Builds a distribution, requiring nonnegative entries summing to one
    /// within `tol`. Repeated cells accumulate.
    pub fn new<I>(entries: I, tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (Cell, T)>,
    {
        let support = Self::accumulate(entries)?;
        let total = support.values().fold(T::zero(), |acc, &p| acc + p);
        if (total - T::one()).abs() > T::lit(tol) {
            return Err(Error::Normalization(format!(
                "probabilities sum to {:e}, expected 1",
                total.as_f64()
            )));
        }
        Ok(Distribution { support })
    }

    /// Builds a distribution from nonnegative masses, dividing by their total.
    pub fn from_masses<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Cell, T)>,
    {
        let mut support = Self::accumulate(entries)?;
        let total = support.values().fold(T::zero(), |acc, &p| acc + p);
        if total <= T::zero() {
            return Err(Error::Normalization("total mass is zero".into()));
        }
        for p in support.values_mut() {
            *p /= total;
        }
        Ok(Distribution { support })
    }

    fn accumulate<I>(entries: I) -> Result<BTreeMap<Cell, T>>
    where
        I: IntoIterator<Item = (Cell, T)>,
    {
        let mut support = BTreeMap::new();
        for (cell, p) in entries {
            if !(p >= T::zero()) {
                return Err(Error::InvalidInput(format!(
                    "probability of {cell} must be nonnegative, got {:e}",
                    p.as_f64()
                )));
            }
            *support.entry(cell).or_insert_with(T::zero) += p;
        }
        Ok(support)
    }

    /// The independent simplicial distribution on `2^[m]`:
    /// `p(ξ) = ∏_{i∈ξ} p_i ∏_{j∉ξ} (1 - p_j)`.
    pub fn independent_simplicial(marginals: &[T]) -> Result<Self> {
        let m = marginals.len();
        if m == 0 || m >= usize::BITS as usize {
            return Err(Error::InvalidInput(format!("unsupported vertex count {m}")));
        }
        if let Some((i, p)) = marginals
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p > T::zero() && p < T::one()))
        {
            return Err(Error::Model(format!("p_{i} = {:e} must lie in (0, 1)", p.as_f64())));
        }
        let mut support = BTreeMap::new();
        for mask in 0usize..(1 << m) {
            let mut prob = T::one();
            let mut vertices = Vec::new();
            for (i, &p) in marginals.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    prob *= p;
                    vertices.push(i);
                } else {
                    prob *= T::one() - p;
                }
            }
            support.insert(Cell::simplex(vertices)?, prob);
        }
        Ok(Distribution { support })
    }

    pub fn get(&self, cell: &Cell) -> T {
        self.support.get(cell).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cell, &T)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Masses rescaled so that every length class sums to one. Length
    /// classes with zero total mass are dropped.
    pub fn per_length_normalized(&self) -> BTreeMap<Cell, T> {
        let mut totals: BTreeMap<usize, T> = BTreeMap::new();
        for (cell, &p) in &self.support {
            *totals.entry(cell.len()).or_insert_with(T::zero) += p;
        }
        self.support
            .iter()
            .filter(|(cell, _)| totals[&cell.len()] > T::zero())
            .map(|(cell, &p)| (cell.clone(), p / totals[&cell.len()]))
            .collect()
    }

    /// Probability that vertex `i` belongs to a sampled cell, for each `i`.
    pub fn vertex_marginals(&self, vertex_count: usize) -> Vec<T> {
        let mut out = vec![T::zero(); vertex_count];
        for (cell, &p) in &self.support {
            for &v in cell.vertices() {
                if v < vertex_count {
                    out[v] += p;
                }
            }
        }
        out
    }

    fn check_support(&self, complex: &ComplexIndex) -> Result<()> {
        match self.support.keys().find(|c| !complex.contains(c)) {
            Some(cell) => Err(Error::UnknownCell { cell: cell.to_string() }),
            None => Ok(()),
        }
    }
}

/// How a weight function was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Conditional,
    Moment,
    EmptyNormalized,
    IndependentSequence,
    IndependentSimplicial,
    Raw,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Conditional => "conditional",
            Provenance::Moment => "moment",
            Provenance::EmptyNormalized => "empty-normalized",
            Provenance::IndependentSequence => "independent-sequence",
            Provenance::IndependentSimplicial => "independent-simplicial",
            Provenance::Raw => "raw",
        }
    }
}

/// Strictly positive weights on every cell of a complex, stored densely in
/// the complex's index order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction<T> {
    /// `values[dim + 1][index]`.
    values: Vec<Vec<T>>,
    provenance: Provenance,
    /// Vertex marginals of the source distribution, when there was one.
    marginals: Option<Vec<T>>,
}

impl<T: Real> WeightFunction<T> {
    /// Wraps dense per-dimension values (`values[dim + 1]`) after checking
    /// shapes against `complex` and positivity.
    pub fn from_dense(
        complex: &ComplexIndex,
        values: Vec<Vec<T>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let expected = (complex.top_dim() + 2) as usize;
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        for dim in -1..=complex.top_dim() {
            let slice = &values[(dim + 1) as usize];
            let count = complex.cell_count(dim);
            if slice.len() != count {
                return Err(Error::DimensionMismatch { expected: count, found: slice.len() });
            }
            if let Some((i, &v)) = slice.iter().enumerate().find(|(_, &v)| !(v > T::zero())) {
                return Err(Error::Positivity {
                    cell: complex.cell(dim, i).to_string(),
                    value: v.as_f64(),
                });
            }
        }
        Ok(WeightFunction { values, provenance, marginals: None })
    }

    /// Raw weights given per cell; every cell of the complex must be covered.
    pub fn from_cells<I>(complex: &ComplexIndex, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Cell, T)>,
    {
        let mut values = empty_layout(complex, T::zero());
        for (cell, v) in entries {
            let idx = complex
                .index_of(&cell)
                .ok_or_else(|| Error::UnknownCell { cell: cell.to_string() })?;
            values[(cell.dim() + 1) as usize][idx] = v;
        }
        Self::from_dense(complex, values, Provenance::Raw)
    }

    /// Builds weights by evaluating `f` on every cell.
    pub fn from_fn<F>(complex: &ComplexIndex, provenance: Provenance, mut f: F) -> Result<Self>
    where
        F: FnMut(&Cell) -> T,
    {
        let mut values = empty_layout(complex, T::zero());
        for dim in complex.dims() {
            for (i, cell) in complex.cells(dim).enumerate() {
                values[(dim + 1) as usize][i] = f(&cell);
            }
        }
        Self::from_dense(complex, values, provenance)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn marginals(&self) -> Option<&[T]> {
        self.marginals.as_deref()
    }

    pub fn with_marginals(mut self, marginals: Vec<T>) -> Self {
        self.marginals = Some(marginals);
        self
    }

    /// Weights of dimension `dim`; empty outside the stored range.
    pub fn slice(&self, dim: isize) -> &[T] {
        if dim < -1 || dim + 1 >= self.values.len() as isize {
            return &[];
        }
        &self.values[(dim + 1) as usize]
    }

    pub fn value(&self, dim: isize, index: usize) -> T {
        self.values[(dim + 1) as usize][index]
    }

    pub fn get(&self, complex: &ComplexIndex, cell: &Cell) -> Option<T> {
        complex.index_of(cell).map(|i| self.value(cell.dim(), i))
    }

    /// Weight of a sequence given by its raw vertices (full sequence complexes).
    pub(crate) fn sequence_weight(&self, complex: &ComplexIndex, vertices: &[VertexId]) -> T {
        self.value(vertices.len() as isize - 1, complex.sequence_index(vertices))
    }

    /// Every weight multiplied by the same positive constant.
    pub fn scaled(&self, alpha: T) -> Self {
        WeightFunction {
            values: self.values.iter().map(|s| s.iter().map(|&v| v * alpha).collect()).collect(),
            provenance: Provenance::Raw,
            marginals: None,
        }
    }

    /// Replaces the weight of one cell, keeping positivity.
    pub fn with_value(mut self, complex: &ComplexIndex, cell: &Cell, value: T) -> Result<Self> {
        let idx = complex
            .index_of(cell)
            .ok_or_else(|| Error::UnknownCell { cell: cell.to_string() })?;
        if !(value > T::zero()) {
            return Err(Error::Positivity { cell: cell.to_string(), value: value.as_f64() });
        }
        self.values[(cell.dim() + 1) as usize][idx] = value;
        self.provenance = Provenance::Raw;
        self.marginals = None;
        Ok(self)
    }

    pub fn dim_sum(&self, dim: isize) -> T {
        self.slice(dim).iter().fold(T::zero(), |acc, &v| acc + v)
    }

    pub(crate) fn layout_len(&self) -> usize {
        self.values.len()
    }
}

fn empty_layout<T: Clone>(complex: &ComplexIndex, fill: T) -> Vec<Vec<T>> {
    (-1..=complex.top_dim()).map(|d| vec![fill.clone(); complex.cell_count(d)]).collect()
}

/// Checks that `w` was built for `complex`.
pub(crate) fn check_layout<T: Real>(complex: &ComplexIndex, w: &WeightFunction<T>) -> Result<()> {
    let expected = (complex.top_dim() + 2) as usize;
    if w.layout_len() != expected {
        return Err(Error::DimensionMismatch { expected, found: w.layout_len() });
    }
    for dim in -1..=complex.top_dim() {
        let (expected, found) = (complex.cell_count(dim), w.slice(dim).len());
        if expected != found {
            return Err(Error::DimensionMismatch { expected, found });
        }
    }
    Ok(())
}

/// Conditional probability of each cell given its length.
pub fn conditional_weights<T: Real>(
    complex: &ComplexIndex,
    p: &Distribution<T>,
) -> Result<WeightFunction<T>> {
    p.check_support(complex)?;
    let mut values = empty_layout(complex, T::zero());
    for dim in complex.dims() {
        let masses: Vec<T> = complex.cells(dim).map(|c| p.get(&c)).collect();
        let total = masses.iter().fold(T::zero(), |acc, &v| acc + v);
        if total <= T::zero() {
            return Err(Error::DegenerateSlice { dim });
        }
        if let Some(i) = masses.iter().position(|&v| v <= T::zero()) {
            return Err(Error::Positivity { cell: complex.cell(dim, i).to_string(), value: 0.0 });
        }
        values[(dim + 1) as usize] = masses.into_iter().map(|v| v / total).collect();
    }
    WeightFunction::from_dense(complex, values, Provenance::Conditional)
}

fn simplex_mask(cell: &Cell) -> Result<u64> {
    cell.vertices().iter().try_fold(0u64, |acc, &v| {
        if v >= 64 {
            Err(Error::InvalidInput("moment map supports at most 64 vertices".into()))
        } else {
            Ok(acc | (1u64 << v))
        }
    })
}

fn require_simplicial(complex: &ComplexIndex) -> Result<()> {
    if complex.kind() != ComplexKind::Simplicial {
        return Err(Error::InvalidInput("operation requires a simplicial complex".into()));
    }
    Ok(())
}

/// `m_p(ξ) = Σ_{ζ ⊇ ξ} p(ζ)`, evaluated on every cell of `complex`.
///
/// `p` may be supported anywhere in `2^[m]`; it need not live on `complex`.
pub fn moment_map<T: Real>(
    complex: &ComplexIndex,
    p: &Distribution<T>,
) -> Result<WeightFunction<T>> {
    require_simplicial(complex)?;
    let mut atoms = Vec::with_capacity(p.len());
    for (cell, &prob) in p.iter() {
        if cell.kind() == CellKind::Sequence {
            return Err(Error::WrongCellKind { expected: "simplex", found: "sequence" });
        }
        if let Some(&v) = cell.vertices().iter().find(|&&v| v >= complex.vertex_count()) {
            return Err(Error::VertexOutOfRange { vertex: v, vertex_count: complex.vertex_count() });
        }
        atoms.push((simplex_mask(cell)?, prob));
    }
    let mut values = empty_layout(complex, T::zero());
    for dim in complex.dims() {
        for (i, cell) in complex.cells(dim).enumerate() {
            let mask = simplex_mask(&cell)?;
            let moment = atoms
                .iter()
                .filter(|(z, _)| mask & !z == 0)
                .fold(T::zero(), |acc, &(_, p)| acc + p);
            if moment <= T::zero() {
                return Err(Error::Positivity { cell: cell.to_string(), value: moment.as_f64() });
            }
            values[(dim + 1) as usize][i] = moment;
        }
    }
    Ok(WeightFunction::from_dense(complex, values, Provenance::Moment)?
        .with_marginals(p.vertex_marginals(complex.vertex_count())))
}

/// `p_∅(ξ) = p(ξ) / p(∅)`.
pub fn empty_normalized<T: Real>(
    complex: &ComplexIndex,
    p: &Distribution<T>,
) -> Result<WeightFunction<T>> {
    let empty_mass = p.get(&Cell::empty());
    if empty_mass <= T::zero() {
        return Err(Error::Normalization("p(∅) must be positive".into()));
    }
    let mut values = empty_layout(complex, T::zero());
    for dim in complex.dims() {
        for (i, cell) in complex.cells(dim).enumerate() {
            let prob = p.get(&cell);
            if prob <= T::zero() {
                return Err(Error::Positivity { cell: cell.to_string(), value: prob.as_f64() });
            }
            values[(dim + 1) as usize][i] = prob / empty_mass;
        }
    }
    Ok(WeightFunction::from_dense(complex, values, Provenance::EmptyNormalized)?
        .with_marginals(p.vertex_marginals(complex.vertex_count())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFlavor {
    Sequence,
    Simplicial,
}

/// Per-vertex weights of an independent vertices model.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentModel<T> {
    vertex_weights: Vec<T>,
    flavor: ModelFlavor,
}

impl<T: Real> IndependentModel<T> {
    /// Sequence flavor: entries in `(0, 1]` summing to one within `tol`.
    pub fn sequence(vertex_weights: Vec<T>, tol: f64) -> Result<Self> {
        check_positive(&vertex_weights)?;
        if let Some((i, w)) = vertex_weights.iter().enumerate().find(|(_, &w)| w > T::one()) {
            return Err(Error::Model(format!("w_{i} = {:e} exceeds 1", w.as_f64())));
        }
        let total = vertex_weights.iter().fold(T::zero(), |acc, &w| acc + w);
        if (total - T::one()).abs() > T::lit(tol) {
            return Err(Error::Model(format!(
                "vertex weights sum to {:e}, expected 1",
                total.as_f64()
            )));
        }
        Ok(IndependentModel { vertex_weights, flavor: ModelFlavor::Sequence })
    }

    /// Simplicial flavor: any strictly positive vector.
    pub fn simplicial(vertex_weights: Vec<T>) -> Result<Self> {
        check_positive(&vertex_weights)?;
        Ok(IndependentModel { vertex_weights, flavor: ModelFlavor::Simplicial })
    }

    pub fn vertex_weights(&self) -> &[T] {
        &self.vertex_weights
    }

    pub fn flavor(&self) -> ModelFlavor {
        self.flavor
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_weights.len()
    }

    /// `Σ_i w_i`.
    pub fn total(&self) -> T {
        self.vertex_weights.iter().fold(T::zero(), |acc, &w| acc + w)
    }

    fn product(&self, cell: &Cell) -> T {
        cell.vertices().iter().fold(T::one(), |acc, &v| acc * self.vertex_weights[v])
    }
}

fn check_positive<T: Real>(weights: &[T]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Model("no vertex weights".into()));
    }
    match weights.iter().enumerate().find(|(_, &w)| !(w > T::zero())) {
        Some((i, w)) => Err(Error::Positivity { cell: format!("{i}"), value: w.as_f64() }),
        None => Ok(()),
    }
}

fn check_model_fits<T: Real>(complex: &ComplexIndex, model: &IndependentModel<T>) -> Result<()> {
    if model.vertex_count() != complex.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: complex.vertex_count(),
            found: model.vertex_count(),
        });
    }
    Ok(())
}

/// Product weights `w((v_0..v_n)) = ∏ w_{v_i}` with `w(∅) = 1`.
pub fn independent_sequence_weights<T: Real>(
    complex: &ComplexIndex,
    model: &IndependentModel<T>,
) -> Result<WeightFunction<T>> {
    if complex.kind() != ComplexKind::FullSequence {
        return Err(Error::InvalidInput("sequence model requires a full sequence complex".into()));
    }
    if model.flavor() != ModelFlavor::Sequence {
        return Err(Error::Model("sequence weights need a sequence-flavor model".into()));
    }
    check_model_fits(complex, model)?;
    WeightFunction::from_fn(complex, Provenance::IndependentSequence, |c| model.product(c))
}

/// Product weights `w(ξ) = ∏_{i∈ξ} w_i` with `w(∅) = 1`.
pub fn independent_simplicial_weights<T: Real>(
    complex: &ComplexIndex,
    model: &IndependentModel<T>,
) -> Result<WeightFunction<T>> {
    require_simplicial(complex)?;
    check_model_fits(complex, model)?;
    WeightFunction::from_fn(complex, Provenance::IndependentSimplicial, |c| model.product(c))
}

/// Outcome of testing whether simplicial weights factor over vertices.
#[derive(Debug, Clone, PartialEq)]
pub enum Factorization<T> {
    Independent { vertex_weights: Vec<T> },
    Dependent { witness: Cell, deviation: T },
}

impl<T> Factorization<T> {
    pub fn is_independent(&self) -> bool {
        matches!(self, Factorization::Independent { .. })
    }
}

/// Checks `w(ξ) = ∏_{i∈ξ} w({i})` on every face, to relative `tol`.
pub fn factorization_test<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    tol: f64,
) -> Result<Factorization<T>> {
    require_simplicial(complex)?;
    check_layout(complex, w)?;
    if complex.min_dim() > -1 {
        return Err(Error::Precondition("factorization needs the empty cell".into()));
    }
    let empty = w.value(-1, 0);
    if (empty - T::one()).abs() > T::lit(tol) {
        return Err(Error::Precondition(format!(
            "w(∅) = {:e}, expected 1",
            empty.as_f64()
        )));
    }
    let mut vertex_weights = vec![T::zero(); complex.vertex_count()];
    for (i, cell) in complex.cells(0).enumerate() {
        vertex_weights[cell.vertices()[0]] = w.value(0, i);
    }
    for dim in 1..=complex.top_dim() {
        for (i, cell) in complex.cells(dim).enumerate() {
            let predicted =
                cell.vertices().iter().fold(T::one(), |acc, &v| acc * vertex_weights[v]);
            let deviation = (w.value(dim, i) - predicted).abs() / predicted;
            if deviation > T::lit(tol) {
                return Ok(Factorization::Dependent { witness: cell, deviation });
            }
        }
    }
    Ok(Factorization::Independent { vertex_weights })
}

/// Relative-frequency distribution of observed cells, with an additive
/// `smoothing` mass on every cell of `complex`.
pub fn fit_distribution<T: Real>(
    complex: &ComplexIndex,
    observations: &[Cell],
    smoothing: T,
) -> Result<Distribution<T>> {
    if smoothing < T::zero() {
        return Err(Error::InvalidInput("smoothing must be nonnegative".into()));
    }
    let mut masses: BTreeMap<Cell, T> = BTreeMap::new();
    if smoothing > T::zero() {
        for dim in complex.dims() {
            for cell in complex.cells(dim) {
                masses.insert(cell, smoothing);
            }
        }
    }
    for cell in observations {
        if !complex.contains(cell) {
            return Err(Error::UnknownCell { cell: cell.to_string() });
        }
        *masses.entry(cell.clone()).or_insert_with(T::zero) += T::one();
    }
    Distribution::from_masses(masses)
}

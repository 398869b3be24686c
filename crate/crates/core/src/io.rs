//! JSON schemas for complexes, weights and cochains, vertex vocabularies,
//! cell names, corpus ingestion and fixed-precision float output.
//!
//! Cell names: sequences `a.b.a`, simplices `{a,b}`, the empty cell `()`.

use std::collections::HashMap;
use std::fmt;
use std::io;

use nalgebra::DVector;
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex::{Cell, ComplexIndex, ComplexKind, VertexId};
use crate::error::{Error, Result};
use crate::weights::{
    conditional_weights, empty_normalized, fit_distribution, independent_sequence_weights,
    independent_simplicial_weights, moment_map, Distribution, IndependentModel, WeightFunction,
};

/// `(cell name, value)` pairs kept in order; (de)serialized as a JSON object.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellMap(pub Vec<(String, f64)>);

impl Serialize for CellMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for CellMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CellMapVisitor;
        impl<'de> Visitor<'de> for CellMapVisitor {
            type Value = CellMap;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping cell names to numbers")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<CellMap, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, f64>()? {
                    out.push((k, v));
                }
                Ok(CellMap(out))
            }
        }
        deserializer.deserialize_map(CellMapVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKindSpec {
    Sequence,
    Simplicial,
}

/// Cells of one dimension, by name, in index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellLayer {
    pub dim: isize,
    pub cells: Vec<String>,
}

/// Complex description. Sequence complexes need `max_dim`; simplicial
/// complexes are the downward closure of `facets`, optionally truncated to
/// their `max_dim`-skeleton. `cells`, when present, must match the
/// enumeration exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub kind: ComplexKindSpec,
    pub vertices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<isize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub facets: Vec<Vec<String>>,
    #[serde(default = "default_true")]
    pub augmented: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<CellLayer>>,
}

fn default_true() -> bool {
    true
}

/// Weight description, tagged by `model`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Independent { vertex_weights: CellMap },
    Conditional { probabilities: CellMap },
    Moment { probabilities: CellMap },
    EmptyNormalized { probabilities: CellMap },
    Raw { weights: CellMap },
}

/// Bijection between external vertex names and dense ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    names: Vec<String>,
    ids: HashMap<String, VertexId>,
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| matches!(c, '.' | ',' | '{' | '}' | '(' | ')') || c.is_whitespace()) {
        return Err(Error::InvalidInput(format!(
            "vertex name {name:?} must be nonempty without separators, braces or whitespace"
        )));
    }
    Ok(())
}

impl Vocabulary {
    pub fn from_names(names: &[String]) -> Result<Self> {
        let mut vocab = Vocabulary::default();
        for name in names {
            check_name(name)?;
            if vocab.ids.contains_key(name) {
                return Err(Error::InvalidInput(format!("duplicate vertex name {name:?}")));
            }
            vocab.intern(name);
        }
        Ok(vocab)
    }

    /// Id of `name`, assigning the next id on first sight.
    pub fn intern(&mut self, name: &str) -> VertexId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Result<VertexId> {
        self.ids
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown vertex {name:?}")))
    }

    pub fn name(&self, id: VertexId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A complex together with its vocabulary and source description.
#[derive(Debug, Clone)]
pub struct LoadedComplex {
    pub complex: ComplexIndex,
    pub vocab: Vocabulary,
    pub spec: ComplexSpec,
}

impl LoadedComplex {
    pub fn cell_name(&self, cell: &Cell) -> String {
        cell.display_with(|v| self.vocab.name(v))
    }

    /// Parses a cell name of this complex's kind.
    pub fn parse_cell(&self, name: &str) -> Result<Cell> {
        let name = name.trim();
        if name == "()" || name == "{}" {
            return Ok(Cell::empty());
        }
        let cell = match self.complex.kind() {
            ComplexKind::FullSequence => {
                let ids = name.split('.').map(|t| self.vocab.id(t)).collect::<Result<Vec<_>>>()?;
                Cell::sequence(ids)
            }
            ComplexKind::Simplicial => {
                let inner = name.strip_prefix('{').and_then(|s| s.strip_suffix('}')).unwrap_or(name);
                let ids = inner.split(',').map(|t| self.vocab.id(t.trim())).collect::<Result<Vec<_>>>()?;
                Cell::simplex(ids)?
            }
        };
        Ok(cell)
    }

    /// Parses a cell name and requires it to be in the complex.
    pub fn lookup(&self, name: &str) -> Result<(Cell, usize)> {
        let cell = self.parse_cell(name)?;
        let idx = self
            .complex
            .index_of(&cell)
            .ok_or_else(|| Error::UnknownCell { cell: name.to_string() })?;
        Ok((cell, idx))
    }

    pub fn names_of_dim(&self, dim: isize) -> Vec<String> {
        self.complex.cells(dim).map(|c| self.cell_name(&c)).collect()
    }

    /// The source description with the full cell enumeration attached.
    pub fn to_spec_with_cells(&self) -> ComplexSpec {
        let mut spec = self.spec.clone();
        spec.augmented = self.complex.is_augmented();
        spec.cells = Some(
            self.complex
                .dims()
                .map(|dim| CellLayer { dim, cells: self.names_of_dim(dim) })
                .collect(),
        );
        spec
    }
}

/// Builds the complex described by `spec`. `force_unaugmented` drops the
/// empty cell regardless of `spec.augmented`.
pub fn load_complex(spec: &ComplexSpec, budget: usize, force_unaugmented: bool) -> Result<LoadedComplex> {
    let vocab = Vocabulary::from_names(&spec.vertices)?;
    if vocab.is_empty() {
        return Err(Error::InvalidInput("complex needs at least one vertex".into()));
    }
    let mut complex = match spec.kind {
        ComplexKindSpec::Sequence => {
            let max_dim = spec
                .max_dim
                .ok_or_else(|| Error::InvalidInput("sequence complex needs max_dim".into()))?;
            if !spec.facets.is_empty() {
                return Err(Error::InvalidInput("sequence complexes take no facets".into()));
            }
            ComplexIndex::full_sequence_with_budget(vocab.len(), max_dim, budget)?
        }
        ComplexKindSpec::Simplicial => {
            let facets = spec
                .facets
                .iter()
                .map(|f| f.iter().map(|n| vocab.id(n)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let complex = ComplexIndex::simplicial_with_budget(vocab.len(), &facets, budget)?;
            match spec.max_dim {
                Some(k) => complex.skeleton(k),
                None => complex,
            }
        }
    };
    if force_unaugmented || !spec.augmented {
        complex = complex.without_augmentation();
    }
    let loaded = LoadedComplex { complex, vocab, spec: spec.clone() };
    if let Some(layers) = &spec.cells {
        let expected = loaded.to_spec_with_cells().cells.expect("just set");
        if !force_unaugmented && *layers != expected {
            return Err(Error::InvalidInput(
                "listed cells differ from the enumeration of the described complex".into(),
            ));
        }
    }
    Ok(loaded)
}

/// Weights together with the independent model they came from, if any.
#[derive(Debug, Clone)]
pub struct LoadedWeights {
    pub weights: WeightFunction<f64>,
    pub model: Option<IndependentModel<f64>>,
}

fn parse_entries(loaded: &LoadedComplex, map: &CellMap) -> Result<Vec<(Cell, f64)>> {
    map.0.iter().map(|(name, v)| Ok((loaded.parse_cell(name)?, *v))).collect()
}

/// Evaluates a weight description on `loaded`. `tol` bounds the
/// normalization error of distributions and sequence-model vertex weights.
/// Conditional probabilities are renormalized by their total mass; the
/// conditional weights only depend on ratios within each dimension.
pub fn load_weights(loaded: &LoadedComplex, spec: &WeightSpec, tol: f64) -> Result<LoadedWeights> {
    let complex = &loaded.complex;
    match spec {
        WeightSpec::Independent { vertex_weights } => {
            let mut values = vec![None; loaded.vocab.len()];
            for (name, v) in &vertex_weights.0 {
                values[loaded.vocab.id(name)?] = Some(*v);
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| {
                        Error::Model(format!("missing weight for vertex {:?}", loaded.vocab.name(i)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let (model, weights) = match complex.kind() {
                ComplexKind::FullSequence => {
                    let model = IndependentModel::sequence(values, tol)?;
                    let w = independent_sequence_weights(complex, &model)?;
                    (model, w)
                }
                ComplexKind::Simplicial => {
                    let model = IndependentModel::simplicial(values)?;
                    let w = independent_simplicial_weights(complex, &model)?;
                    (model, w)
                }
            };
            Ok(LoadedWeights { weights, model: Some(model) })
        }
        WeightSpec::Conditional { probabilities } => {
            let p = Distribution::from_masses(parse_entries(loaded, probabilities)?)?;
            Ok(LoadedWeights { weights: conditional_weights(complex, &p)?, model: None })
        }
        WeightSpec::Moment { probabilities } => {
            let p = Distribution::new(parse_entries(loaded, probabilities)?, tol)?;
            Ok(LoadedWeights { weights: moment_map(complex, &p)?, model: None })
        }
        WeightSpec::EmptyNormalized { probabilities } => {
            let p = Distribution::new(parse_entries(loaded, probabilities)?, tol)?;
            Ok(LoadedWeights { weights: empty_normalized(complex, &p)?, model: None })
        }
        WeightSpec::Raw { weights } => {
            let entries = parse_entries(loaded, weights)?;
            let mut seen = vec![Vec::new(); (complex.top_dim() + 2) as usize];
            for d in -1..=complex.top_dim() {
                seen[(d + 1) as usize] = vec![false; complex.cell_count(d)];
            }
            for (cell, _) in &entries {
                if let Some(i) = complex.index_of(cell) {
                    seen[(cell.dim() + 1) as usize][i] = true;
                }
            }
            for dim in complex.dims() {
                if let Some(i) = seen[(dim + 1) as usize].iter().position(|s| !s) {
                    return Err(Error::UnknownCell {
                        cell: format!("{} (missing raw weight)", loaded.cell_name(&complex.cell(dim, i))),
                    });
                }
            }
            let dims = complex.dims();
            let entries = entries.into_iter().filter(|(c, _)| dims.contains(&c.dim()));
            Ok(LoadedWeights { weights: WeightFunction::from_cells(complex, entries)?, model: None })
        }
    }
}

/// A cochain of dimension `dim` from a `{cell: value}` map; absent cells
/// are zero.
pub fn load_cochain(loaded: &LoadedComplex, dim: isize, map: &CellMap) -> Result<DVector<f64>> {
    let mut x = DVector::zeros(loaded.complex.cell_count(dim));
    for (name, v) in &map.0 {
        let (cell, idx) = loaded.lookup(name)?;
        if cell.dim() != dim {
            return Err(Error::InvalidInput(format!(
                "cell {name} has dimension {}, expected {dim}",
                cell.dim()
            )));
        }
        x[idx] = *v;
    }
    Ok(x)
}

/// `{cell: value}` for every cell of dimension `dim`, in index order.
pub fn cochain_to_map(loaded: &LoadedComplex, dim: isize, x: &DVector<f64>) -> CellMap {
    CellMap(loaded.names_of_dim(dim).into_iter().zip(x.iter().copied()).collect())
}

/// Result of fitting conditional weights to a corpus.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub complex: LoadedComplex,
    pub weights: WeightSpec,
    pub kept: usize,
    pub dropped: usize,
}

/// Fits per-length relative frequencies to newline-delimited sequences of
/// `.`-separated tokens. Tokens get vertex ids in order of first appearance
/// anywhere in the corpus. Sequences longer than `max_dim + 2` are dropped;
/// `smoothing` is added to the count of every cell. The empty cell gets
/// probability one.
pub fn ingest_corpus(text: &str, max_dim: isize, smoothing: f64, budget: usize) -> Result<Ingested> {
    let mut vocab = Vocabulary::default();
    let mut sequences: Vec<Vec<VertexId>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut ids = Vec::new();
        for token in line.split('.') {
            check_name(token).map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)))?;
            ids.push(vocab.intern(token));
        }
        sequences.push(ids);
    }
    if vocab.is_empty() {
        return Err(Error::InvalidInput("corpus contains no sequences".into()));
    }
    let spec = ComplexSpec {
        kind: ComplexKindSpec::Sequence,
        vertices: vocab.names().to_vec(),
        max_dim: Some(max_dim),
        facets: Vec::new(),
        augmented: true,
        cells: None,
    };
    let loaded = load_complex(&spec, budget, false)?;
    let limit = (loaded.complex.top_dim() + 1) as usize;
    let total = sequences.len();
    let observations: Vec<Cell> =
        sequences.into_iter().filter(|s| s.len() <= limit).map(Cell::sequence).collect();
    let kept = observations.len();
    let mut probabilities = Vec::new();
    if kept > 0 || smoothing > 0.0 {
        let p = fit_distribution(&loaded.complex, &observations, smoothing)?;
        let mut conditional = p.per_length_normalized();
        conditional.insert(Cell::empty(), 1.0);
        let mut ordered: Vec<(isize, usize, String, f64)> = conditional
            .into_iter()
            .filter(|(_, v)| *v > 0.0)
            .map(|(c, v)| {
                let idx = loaded.complex.index_of(&c).expect("fitted on this complex");
                (c.dim(), idx, loaded.cell_name(&c), v)
            })
            .collect();
        ordered.sort_by_key(|e| (e.0, e.1));
        probabilities = ordered.into_iter().map(|(_, _, n, v)| (n, v)).collect();
    } else {
        probabilities.push(("()".to_string(), 1.0));
    }
    Ok(Ingested {
        complex: loaded,
        weights: WeightSpec::Conditional { probabilities: CellMap(probabilities) },
        kept,
        dropped: total - kept,
    })
}

/// Prints `x` with 17 significant digits; negative zero prints as zero.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// JSON formatter printing every float with 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPrecision;

impl serde_json::ser::Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with [`FixedPrecision`] floats.
pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedPrecision);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_spec() -> ComplexSpec {
        serde_json::from_str(r#"{"kind":"sequence","vertices":["a","b"],"max_dim":1}"#).unwrap()
    }

    #[test]
    fn cell_names_round_trip() {
        let loaded = load_complex(&seq_spec(), 1000, false).unwrap();
        let (cell, idx) = loaded.lookup("b.a").unwrap();
        assert_eq!(idx, 2);
        assert_eq!(loaded.cell_name(&cell), "b.a");
        assert_eq!(loaded.lookup("()").unwrap().0, Cell::empty());
        assert!(loaded.lookup("c").is_err());
        let simp: ComplexSpec = serde_json::from_str(
            r#"{"kind":"simplicial","vertices":["x","y","z"],"facets":[["z","x"]]}"#,
        )
        .unwrap();
        let s = load_complex(&simp, 1000, false).unwrap();
        let (cell, _) = s.lookup("{z,x}").unwrap();
        assert_eq!(s.cell_name(&cell), "{x,z}");
    }

    #[test]
    fn build_output_reloads_identically() {
        let loaded = load_complex(&seq_spec(), 1000, false).unwrap();
        let spec = loaded.to_spec_with_cells();
        let text = to_json(&spec).unwrap();
        let back: ComplexSpec = serde_json::from_str(&text).unwrap();
        let again = load_complex(&back, 1000, false).unwrap();
        assert_eq!(again.to_spec_with_cells(), spec);
        let mut tampered = spec.clone();
        tampered.cells.as_mut().unwrap()[1].cells.swap(0, 1);
        assert!(load_complex(&tampered, 1000, false).is_err());
    }

    #[test]
    fn weight_models_load() {
        let loaded = load_complex(&seq_spec(), 1000, false).unwrap();
        let spec: WeightSpec =
            serde_json::from_str(r#"{"model":"independent","vertex_weights":{"a":0.5,"b":0.5}}"#)
                .unwrap();
        let w = load_weights(&loaded, &spec, 1e-12).unwrap();
        assert!(w.model.is_some());
        assert_eq!(w.weights.value(2, 5), 0.125);
        let bad: WeightSpec =
            serde_json::from_str(r#"{"model":"independent","vertex_weights":{"a":0.7,"b":0.7}}"#)
                .unwrap();
        assert!(matches!(load_weights(&loaded, &bad, 1e-12), Err(Error::Model(_))));
        assert!(serde_json::from_str::<WeightSpec>(r#"{"model":"bogus"}"#).is_err());
    }

    #[test]
    fn ingest_assigns_first_appearance_ids() {
        let out = ingest_corpus("b.a\na\nb.b.b.b\n\nc\n", 1, 0.0, 1000).unwrap();
        assert_eq!(out.complex.vocab.names(), ["b", "a", "c"]);
        assert_eq!((out.kept, out.dropped), (3, 1));
        let WeightSpec::Conditional { probabilities } = &out.weights else { panic!() };
        assert_eq!(probabilities.0[0], ("()".to_string(), 1.0));
        let zero: f64 = probabilities.0.iter().filter(|(n, _)| n.len() == 1).map(|p| p.1).sum();
        assert!((zero - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_precision_json() {
        assert_eq!(to_json(&vec![0.1f64, -2.0]).unwrap(), "[1.0000000000000001e-1,-2.0000000000000000e0]");
    }
}

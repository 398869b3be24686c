//! CSV and JSON renderings. Every float goes through `format_float`, so
//! repeated runs produce byte-identical files.

use anyhow::Result;
use nalgebra::DMatrix;
use serde::Serialize;

use hodgeseq::hodge::SpectrumReport;
use hodgeseq::io::{format_float, to_json, CellMap};

#[derive(Serialize)]
pub struct Decomposition {
    pub dim: isize,
    pub harmonic: CellMap,
    pub exact: CellMap,
    pub coexact: CellMap,
}

#[derive(Serialize)]
struct MatrixDoc<'a> {
    dim: isize,
    part: &'a str,
    cells: &'a [String],
    matrix: Vec<Vec<f64>>,
}

/// Header `cell,<names>`, then one row per cell.
pub fn matrix_csv(names: &[String], m: &DMatrix<f64>) -> String {
    let mut out = String::from("cell");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (name, row) in names.iter().zip(m.row_iter()) {
        out.push_str(name);
        for &v in row.iter() {
            out.push(',');
            out.push_str(&format_float(v));
        }
        out.push('\n');
    }
    out
}

pub fn matrix_json(dim: isize, part: &str, names: &[String], m: &DMatrix<f64>) -> Result<String> {
    let matrix = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    Ok(to_json(&MatrixDoc { dim, part, cells: names, matrix })? + "\n")
}

pub fn spectrum_csv(reports: &[SpectrumReport<f64>]) -> String {
    let mut out = String::from("dim,eigenvalue,multiplicity,attribution\n");
    for r in reports {
        for c in &r.clusters {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.dim,
                format_float(c.eigenvalue),
                c.multiplicity,
                c.attribution.name()
            ));
        }
    }
    out
}

pub fn embedding_csv(names: &[String], coords: &DMatrix<f64>) -> String {
    let mut out = String::from("cell");
    for k in 1..=coords.ncols() {
        out.push_str(&format!(",c{k}"));
    }
    out.push('\n');
    for (name, row) in names.iter().zip(coords.row_iter()) {
        out.push_str(name);
        for &v in row.iter() {
            out.push(',');
            out.push_str(&format_float(v));
        }
        out.push('\n');
    }
    out
}

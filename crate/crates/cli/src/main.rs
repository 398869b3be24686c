//! `hodgeseq`: build complexes, assemble weighted Hodge Laplacians, and
//! report spectra, decompositions, embeddings and theorem checks.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on any input
//! or numerical error.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hodgeseq::complex::DEFAULT_CELL_BUDGET;
use hodgeseq::hodge::{hodge_decompose, laplacian, spectrum, DEFAULT_CLUSTER_TOL};
use hodgeseq::io::{
    cochain_to_map, ingest_corpus, load_cochain, load_complex, load_weights, to_json, CellMap,
    ComplexSpec, LoadedComplex, LoadedWeights, WeightSpec,
};
use hodgeseq::spectral::{
    merge_reports, spectral_embed, verify_hodge, verify_scaling, verify_sequence_theorem,
    verify_simplicial_theorem, EmbedScaling, VerificationReport,
};
use hodgeseq::weights::{ModelFlavor, DEFAULT_TOL};
use hodgeseq::ComplexKind;

#[derive(Parser)]
#[command(name = "hodgeseq", version, about = "Weighted Hodge Laplacians on sequence and simplicial complexes")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Drop the empty cell (dimension -1) from the grading.
    #[arg(long, global = true)]
    no_augmentation: bool,
    /// Largest number of cells allowed in any one dimension.
    #[arg(long, global = true, env = "HODGESEQ_CELL_BUDGET", default_value_t = DEFAULT_CELL_BUDGET)]
    cell_budget: usize,
    /// Numerical tolerance. Bounds weight normalization (default 1e-12) and,
    /// for `verify`, the checks (default depends on the theorem).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative gap separating eigenvalue clusters.
    #[arg(long, global = true, default_value_t = DEFAULT_CLUSTER_TOL)]
    cluster_tol: f64,
}

#[derive(Args)]
struct Inputs {
    /// Complex description (JSON).
    #[arg(long)]
    complex: PathBuf,
    /// Weight description (JSON).
    #[arg(long)]
    weights: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the cells of a complex.
    Build {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a Laplacian as a dense matrix.
    Laplacian {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, allow_negative_numbers = true)]
        dim: isize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Part::Full)]
        part: Part,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue clusters as CSV `dim,eigenvalue,multiplicity,attribution`.
    Spectrum {
        #[command(flatten)]
        inputs: Inputs,
        /// Dimensions: `n`, `a..b` (inclusive) or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        dims: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a cochain into harmonic, exact and coexact parts.
    Decompose {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, allow_negative_numbers = true)]
        dim: isize,
        /// `{"cell": value}` JSON; absent cells are zero.
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a theorem numerically and write a JSON report.
    Verify {
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[command(flatten)]
        inputs: Inputs,
        /// Dimensions to check; defaults to every dimension with a Laplacian.
        #[arg(long, allow_hyphen_values = true)]
        dims: Option<String>,
        /// Base vertex (name or id) labeling the explicit eigenbasis.
        #[arg(long)]
        base_vertex: Option<String>,
        /// Random cochains per dimension for `hodge`.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Spectral coordinates of cells as CSV `cell,c1,...,cd`.
    Embed {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, allow_negative_numbers = true)]
        dim: isize,
        #[arg(long)]
        components: usize,
        #[arg(long, value_enum, default_value_t = Scaling::None)]
        scaling: Scaling,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit conditional weights to a corpus of `.`-separated sequences.
    Ingest {
        corpus: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        max_dim: isize,
        /// Additive count given to every cell.
        #[arg(long, default_value_t = 0.0)]
        smoothing: f64,
        /// Weights JSON destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the complex description here.
        #[arg(long)]
        complex_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Full,
    Up,
    Down,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    SeqSpectrum,
    SimpIdentity,
    Hodge,
    Scaling,
}

impl Theorem {
    fn default_tol(self) -> f64 {
        match self {
            Theorem::SeqSpectrum => 1e-9,
            Theorem::SimpIdentity => 1e-11,
            Theorem::Hodge => 1e-10,
            Theorem::Scaling => 1e-13,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scaling {
    None,
    InverseSqrt,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let module = err
                .chain()
                .find_map(|e| e.downcast_ref::<hodgeseq::Error>())
                .map_or("input", |e| e.module());
            eprintln!("hodgeseq: {module}: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Job {
    complex: LoadedComplex,
    weights: LoadedWeights,
}

fn load_job(global: &GlobalOpts, inputs: &Inputs) -> Result<Job> {
    let spec: ComplexSpec = read_json(&inputs.complex, "complex")?;
    let complex = load_complex(&spec, global.cell_budget, global.no_augmentation)?;
    let wspec: WeightSpec = read_json(&inputs.weights, "weights")?;
    let weights = load_weights(&complex, &wspec, global.tol.unwrap_or(DEFAULT_TOL))?;
    Ok(Job { complex, weights })
}

/// Parses `n`, `a..b`, `a..=b` (both inclusive) or `a,b,c`.
fn parse_dims(text: &str) -> Result<Vec<isize>> {
    let mut dims = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b): (isize, isize) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty dimension range {part}");
            }
            dims.extend(a..=b);
        } else {
            dims.push(part.parse().with_context(|| format!("bad dimension {part:?}"))?);
        }
    }
    Ok(dims)
}

fn laplacian_dims(complex: &LoadedComplex) -> Vec<isize> {
    let c = &complex.complex;
    (c.min_dim()..=c.max_dim()).collect()
}

fn run(cli: Cli) -> Result<bool> {
    let global = &cli.global;
    if !(global.cluster_tol > 0.0) || global.tol.is_some_and(|t| !(t > 0.0)) {
        bail!("tolerances must be positive");
    }
    match &cli.command {
        Command::Build { complex, out } => {
            let spec: ComplexSpec = read_json(complex, "complex")?;
            let loaded = load_complex(&spec, global.cell_budget, global.no_augmentation)?;
            emit(out.as_deref(), &(to_json(&loaded.to_spec_with_cells())? + "\n"))?;
        }
        Command::Laplacian { inputs, dim, format, part, out } => {
            let job = load_job(global, inputs)?;
            let bundle = laplacian(&job.complex.complex, &job.weights.weights, *dim)?;
            let (matrix, name) = match part {
                Part::Full => (&bundle.full, "full"),
                Part::Up => (&bundle.up, "up"),
                Part::Down => (&bundle.down, "down"),
            };
            let names = job.complex.names_of_dim(*dim);
            let text = match format {
                Format::Csv => output::matrix_csv(&names, matrix),
                Format::Json => output::matrix_json(*dim, name, &names, matrix)?,
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Spectrum { inputs, dims, out } => {
            let job = load_job(global, inputs)?;
            let mut rows = Vec::new();
            for n in parse_dims(dims)? {
                let bundle = laplacian(&job.complex.complex, &job.weights.weights, n)?;
                rows.push(spectrum(&bundle, global.cluster_tol)?);
            }
            emit(out.as_deref(), &output::spectrum_csv(&rows))?;
        }
        Command::Decompose { inputs, dim, cochain, out } => {
            let job = load_job(global, inputs)?;
            let map: CellMap = read_json(cochain, "cochain")?;
            let x = load_cochain(&job.complex, *dim, &map)?;
            let bundle = laplacian(&job.complex.complex, &job.weights.weights, *dim)?;
            let split = hodge_decompose(&bundle, &x)?;
            let doc = output::Decomposition {
                dim: *dim,
                harmonic: cochain_to_map(&job.complex, *dim, &split.harmonic),
                exact: cochain_to_map(&job.complex, *dim, &split.exact),
                coexact: cochain_to_map(&job.complex, *dim, &split.coexact),
            };
            emit(out.as_deref(), &(to_json(&doc)? + "\n"))?;
        }
        Command::Verify { theorem, inputs, dims, base_vertex, samples, seed, report } => {
            let job = load_job(global, inputs)?;
            let tol = global.tol.unwrap_or(theorem.default_tol());
            let dims = match dims {
                Some(d) => parse_dims(d)?,
                None => laplacian_dims(&job.complex),
            };
            let result = verify(&job, *theorem, &dims, tol, base_vertex.as_deref(), *samples, *seed)?;
            emit(report.as_deref(), &(to_json(&result)? + "\n"))?;
            for failed in result.failed_checks() {
                eprintln!(
                    "hodgeseq: check {} failed (dim {:?}): measured {:e}, threshold {:e}; {}",
                    failed.name, failed.dim, failed.measured, failed.threshold, failed.detail
                );
            }
            return Ok(result.passed);
        }
        Command::Embed { inputs, dim, components, scaling, out } => {
            let job = load_job(global, inputs)?;
            let bundle = laplacian(&job.complex.complex, &job.weights.weights, *dim)?;
            let report = spectrum(&bundle, global.cluster_tol)?;
            let scaling = match scaling {
                Scaling::None => EmbedScaling::None,
                Scaling::InverseSqrt => EmbedScaling::InverseSqrtEigenvalue,
            };
            let embedding = spectral_embed(&bundle, &report, *components, scaling)?;
            let names = job.complex.names_of_dim(*dim);
            emit(out.as_deref(), &output::embedding_csv(&names, &embedding.coordinates))?;
        }
        Command::Ingest { corpus, max_dim, smoothing, out, complex_out } => {
            let text = fs::read_to_string(corpus)
                .with_context(|| format!("reading corpus {}", corpus.display()))?;
            let ingested = ingest_corpus(&text, *max_dim, *smoothing, global.cell_budget)?;
            if ingested.dropped > 0 {
                eprintln!(
                    "hodgeseq: dropped {} sequences longer than {}",
                    ingested.dropped,
                    max_dim + 2
                );
            }
            if let Some(path) = complex_out {
                emit(Some(path), &(to_json(&ingested.complex.spec)? + "\n"))?;
            }
            emit(out.as_deref(), &(to_json(&ingested.weights)? + "\n"))?;
        }
    }
    Ok(true)
}

fn resolve_vertex(complex: &LoadedComplex, name: Option<&str>) -> Result<usize> {
    let Some(name) = name else { return Ok(0) };
    if let Ok(id) = complex.vocab.id(name) {
        return Ok(id);
    }
    let id: usize = name.parse().with_context(|| format!("unknown base vertex {name:?}"))?;
    if id >= complex.vocab.len() {
        bail!("base vertex id {id} out of range");
    }
    Ok(id)
}

fn verify(
    job: &Job,
    theorem: Theorem,
    dims: &[isize],
    tol: f64,
    base_vertex: Option<&str>,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let complex = &job.complex.complex;
    let w = &job.weights.weights;
    let report = match theorem {
        Theorem::SeqSpectrum => {
            let model = match &job.weights.model {
                Some(m) if m.flavor() == ModelFlavor::Sequence => m,
                _ => {
                    return Err(hodgeseq::Error::Precondition(
                        "seq-spectrum needs independent weights on a sequence complex".into(),
                    )
                    .into())
                }
            };
            let base = resolve_vertex(&job.complex, base_vertex)?;
            let mut reports = Vec::new();
            for &n in dims.iter().filter(|&&n| n >= 0) {
                reports.push(verify_sequence_theorem(complex, model, n, tol, base)?);
            }
            merge_reports("seq-spectrum", reports)
        }
        Theorem::SimpIdentity => {
            if complex.kind() != ComplexKind::Simplicial {
                bail!(hodgeseq::Error::Precondition("simp-identity needs a simplicial complex".into()));
            }
            verify_simplicial_theorem(complex, w, tol)?
        }
        Theorem::Hodge => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut reports = Vec::new();
            for &n in dims {
                let size = complex.cell_count(n);
                let cochains: Vec<DVector<f64>> = (0..samples)
                    .map(|_| DVector::from_fn(size, |_, _| rng.gen_range(-1.0..1.0)))
                    .collect();
                reports.push(verify_hodge(complex, w, n, &cochains, tol)?);
            }
            merge_reports("hodge", reports)
        }
        Theorem::Scaling => {
            let mut reports = Vec::new();
            for &n in dims {
                reports.push(verify_scaling(complex, w, n, &[1e-3, 1.0, 1e3], tol)?);
            }
            merge_reports("scaling", reports)
        }
    };
    Ok(report)
}

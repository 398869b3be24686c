//! Programmatic checks of the closed-form spectral statements: integer
//! spectra of independent sequence models, scalar Laplacians of independent
//! simplicial models, Hodge decompositions and weight scaling.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::eigenbasis::{basis_matrix, predicted_spectrum, EigenbasisGenerator};
use crate::complex::{ComplexIndex, ComplexKind};
use crate::error::{Error, Result};
use crate::hodge::{laplacian, spectrum, HodgeProjector, DEFAULT_CLUSTER_TOL};
use crate::linalg::{rank, RANK_TOL};
use crate::scalar::Real;
use crate::weights::{
    factorization_test, independent_sequence_weights, Factorization, IndependentModel,
    ModelFlavor, Provenance, WeightFunction,
};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub dim: Option<isize>,
    pub passed: bool,
    /// The measured quantity compared against `threshold`.
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn new(theorem: &str) -> Self {
        VerificationReport { theorem: theorem.to_string(), passed: true, checks: Vec::new() }
    }

    fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    fn absorb(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.push(c);
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, dim: Option<isize>, passed: bool, measured: f64, threshold: f64, detail: String) -> Check {
    Check { name: name.to_string(), dim, passed, measured, threshold, detail }
}

fn nearest_integer_gap(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Spectral checks at dimension `n` of a full sequence complex carrying
/// arbitrary weights `w`, against the integer spectrum and eigenbasis
/// predicted for the independent model behind `generator`:
/// * `spectrum`: sorted eigenvalues match the predicted multiset within `tol`
///   and the clusters reproduce its multiplicities;
/// * `eigen-residual`: `‖L f(η) - λ f(η)‖_w ≤ tol ‖f(η)‖_w` for every `η`;
/// * `basis-rank`: the `f(η)` span `C^n`, and grouping them by base-vertex
///   count reproduces the predicted multiplicities;
/// * `betti`: no harmonic cochains;
/// * `spectral-gap`: the smallest eigenvalue is at least `1 - tol`.
pub fn check_sequence_spectrum<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    generator: &EigenbasisGenerator<T>,
    n: isize,
    tol: f64,
) -> Result<VerificationReport> {
    if complex.kind() != ComplexKind::FullSequence {
        return Err(Error::Precondition("sequence spectrum needs a full sequence complex".into()));
    }
    if n < 0 {
        return Err(Error::Precondition("sequence spectrum is stated for n >= 0".into()));
    }
    let bundle = laplacian(complex, w, n)?;
    let report = spectrum(&bundle, DEFAULT_CLUSTER_TOL)?;
    let m = complex.vertex_count();
    let predicted = predicted_spectrum(n as usize, m);
    let expected: Vec<f64> = predicted
        .iter()
        .flat_map(|&(lambda, mult)| std::iter::repeat_n(lambda as f64, mult as usize))
        .collect();
    let computed: Vec<f64> = report.eigenvalues.iter().map(|v| v.as_f64()).collect();
    let mut out = VerificationReport::new("seq-spectrum");

    let deviation = computed
        .iter()
        .zip(&expected)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let clusters: Vec<(f64, usize)> =
        report.clusters.iter().map(|c| (c.eigenvalue.as_f64(), c.multiplicity)).collect();
    let clusters_match = clusters.len() == predicted.len()
        && clusters.iter().zip(&predicted).all(|(&(v, k), &(lambda, mult))| {
            k as u128 == mult && (v - lambda as f64).abs() <= tol
        });
    let passed = computed.len() == expected.len() && deviation <= tol && clusters_match;
    let detail = if passed {
        format!("clusters {clusters:?}")
    } else {
        match computed.iter().find(|&&v| nearest_integer_gap(v) > tol) {
            Some(v) => format!("eigenvalue {v:.17e} is not an integer within tolerance"),
            None => format!("clusters {clusters:?} differ from predicted {predicted:?}"),
        }
    };
    out.push(check("spectrum", Some(n), passed, deviation, tol, detail));

    let basis = generator.eigenbasis(complex, n)?;
    let mut worst = 0.0f64;
    let mut worst_label = String::new();
    for f in &basis {
        let x = &f.coefficients.values;
        let residual = bundle.apply(x) - x * T::count(f.eigenvalue);
        let rel = (bundle.norm(&residual) / bundle.norm(x)).as_f64();
        if rel > worst || worst_label.is_empty() {
            worst = worst.max(rel);
            worst_label = f.label.to_string();
        }
    }
    out.push(check(
        "eigen-residual",
        Some(n),
        worst <= tol,
        worst,
        tol,
        format!("largest relative residual at label {worst_label}"),
    ));

    let r = rank(&basis_matrix(&basis), RANK_TOL);
    let mut census = vec![0u128; n as usize + 3];
    for f in &basis {
        census[f.eigenvalue] += 1;
    }
    let census: Vec<(usize, u128)> =
        census.into_iter().enumerate().filter(|&(_, c)| c > 0).collect();
    let full = bundle.size();
    out.push(check(
        "basis-rank",
        Some(n),
        r == full && census == predicted,
        r as f64,
        full as f64,
        format!("rank {r} of {full}; census {census:?}"),
    ));

    out.push(check(
        "betti",
        Some(n),
        report.betti == 0,
        report.betti as f64,
        0.0,
        format!("harmonic dimension {}", report.betti),
    ));

    let min = report.min_eigenvalue().map_or(f64::NAN, |v| v.as_f64());
    out.push(check(
        "spectral-gap",
        Some(n),
        min >= 1.0 - tol,
        min,
        1.0 - tol,
        "smallest eigenvalue".into(),
    ));
    Ok(out)
}

/// Runs [`check_sequence_spectrum`] with the product weights of `model`.
pub fn verify_sequence_theorem<T: Real>(
    complex: &ComplexIndex,
    model: &IndependentModel<T>,
    n: isize,
    tol: f64,
    base_vertex: usize,
) -> Result<VerificationReport> {
    if model.flavor() != ModelFlavor::Sequence {
        return Err(Error::Precondition("needs an independent sequence model".into()));
    }
    let w = independent_sequence_weights(complex, model)?;
    let generator = EigenbasisGenerator::new(model, base_vertex)?;
    check_sequence_spectrum(complex, &w, &generator, n, tol)
}

fn is_full_simplex(complex: &ComplexIndex) -> bool {
    let m = complex.vertex_count();
    let mut binom = 1usize;
    for len in 0..=m {
        let dim = len as isize - 1;
        if dim >= complex.min_dim() && complex.cell_count(dim) != binom {
            return false;
        }
        binom = binom * (m - len) / (len + 1);
    }
    complex.top_dim() == m as isize - 1
}

/// Scalar-Laplacian checks on the full simplex with `w(∅) = 1`:
/// * `identity`: `max_n max|L_n - αI| ≤ tol` with `α = Σ_i w({i})`;
/// * `factorization-agreement`: the identity holds exactly when the weights
///   factor over vertices;
/// * `provenance-constant`: for moment-map weights `α = Σ p_i`, for
///   empty-normalized weights `α = Σ p_i/(1-p_i)`, using the source
///   distribution's vertex marginals.
pub fn verify_simplicial_theorem<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    tol: f64,
) -> Result<VerificationReport> {
    if complex.kind() != ComplexKind::Simplicial || !is_full_simplex(complex) {
        return Err(Error::Precondition("needs the full simplex on its vertex set".into()));
    }
    if !complex.is_augmented() {
        return Err(Error::Precondition("needs the empty cell".into()));
    }
    let empty = w.value(-1, 0).as_f64();
    if (empty - 1.0).abs() > tol {
        return Err(Error::Precondition(format!("w(∅) = {empty:e}, expected 1")));
    }
    let alpha = w.slice(0).iter().fold(T::zero(), |acc, &v| acc + v);
    let mut out = VerificationReport::new("simp-identity");
    let mut worst = 0.0f64;
    let mut per_dim = Vec::new();
    for n in complex.dims() {
        let bundle = laplacian(complex, w, n)?;
        let size = bundle.size();
        let dev = (&bundle.full - DMatrix::identity(size, size) * alpha).abs().max().as_f64();
        per_dim.push(format!("n={n}: {dev:.3e}"));
        worst = worst.max(dev);
    }
    let identity = worst <= tol;
    out.push(check(
        "identity",
        None,
        identity,
        worst,
        tol,
        format!("alpha {:.17e}; {}", alpha.as_f64(), per_dim.join(", ")),
    ));

    let factorization = factorization_test(complex, w, tol)?;
    let detail = match &factorization {
        Factorization::Independent { .. } => "weights factor over vertices".to_string(),
        Factorization::Dependent { witness, deviation } => {
            format!("weights do not factor: witness {witness}, deviation {:.3e}", deviation.as_f64())
        }
    };
    out.push(check(
        "factorization-agreement",
        None,
        identity == factorization.is_independent(),
        if factorization.is_independent() { 1.0 } else { 0.0 },
        if identity { 1.0 } else { 0.0 },
        detail,
    ));

    let expected = match (w.provenance(), w.marginals()) {
        (Provenance::Moment, Some(p)) => {
            Some(("moment", p.iter().fold(T::zero(), |acc, &x| acc + x)))
        }
        (Provenance::EmptyNormalized, Some(p)) => Some((
            "empty-normalized",
            p.iter().fold(T::zero(), |acc, &x| acc + x / (T::one() - x)),
        )),
        _ => None,
    };
    if let Some((kind, constant)) = expected {
        let gap = (alpha - constant).abs().as_f64();
        out.push(check(
            "provenance-constant",
            None,
            gap <= tol,
            gap,
            tol,
            format!("{kind} weights: alpha {:.17e}, predicted {:.17e}", alpha.as_f64(), constant.as_f64()),
        ));
    }
    Ok(out)
}

/// Hodge checks at dimension `n`:
/// * `coboundary-square`: `D_n D_{n-1} = 0` exactly;
/// * `cohomology-dimension`: the harmonic dimension equals
///   `dim ker D_n - rank D_{n-1}`;
/// * `reconstruction` / `orthogonality`: each cochain splits into parts that
///   sum back to it and are pairwise orthogonal, within `tol` relative.
pub fn verify_hodge<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    n: isize,
    cochains: &[DVector<T>],
    tol: f64,
) -> Result<VerificationReport> {
    let bundle = laplacian(complex, w, n)?;
    let mut out = VerificationReport::new("hodge");
    let square = bundle.upper.mul(&bundle.lower);
    out.push(check(
        "coboundary-square",
        Some(n),
        square.is_zero(),
        square.nnz() as f64,
        0.0,
        "nonzero entries of D_n D_{n-1}".into(),
    ));

    let projector = HodgeProjector::new(&bundle);
    let size = bundle.size();
    let ker_upper = size - rank(&bundle.upper.to_dense::<T>(), RANK_TOL);
    let rank_lower = rank(&bundle.lower.to_dense::<T>(), RANK_TOL);
    let cohomology = ker_upper - rank_lower;
    let report = spectrum(&bundle, DEFAULT_CLUSTER_TOL)?;
    out.push(check(
        "cohomology-dimension",
        Some(n),
        report.betti == cohomology && projector.harmonic_dim() == cohomology,
        report.betti as f64,
        cohomology as f64,
        format!(
            "kernel of L_n {}, projector complement {}, dim ker D_n - rank D_(n-1) = {cohomology}",
            report.betti,
            projector.harmonic_dim()
        ),
    ));

    let (mut recon, mut ortho) = (0.0f64, 0.0f64);
    for x in cochains {
        let split = projector.split(n, x)?;
        recon = recon.max(split.reconstruction_error().as_f64());
        ortho = ortho.max(split.max_cross_inner().as_f64());
    }
    out.push(check(
        "reconstruction",
        Some(n),
        recon <= tol,
        recon,
        tol,
        format!("{} cochains", cochains.len()),
    ));
    out.push(check(
        "orthogonality",
        Some(n),
        ortho <= tol,
        ortho,
        tol,
        format!("{} cochains", cochains.len()),
    ));
    Ok(out)
}

/// `max |L_n(α w) - L_n(w)|` for each `α`, checked against `tol`.
pub fn verify_scaling<T: Real>(
    complex: &ComplexIndex,
    w: &WeightFunction<T>,
    n: isize,
    alphas: &[T],
    tol: f64,
) -> Result<VerificationReport> {
    let reference = laplacian(complex, w, n)?.full;
    let mut out = VerificationReport::new("scaling");
    for &alpha in alphas {
        if !(alpha > T::zero()) {
            return Err(Error::InvalidInput("scaling factors must be positive".into()));
        }
        let scaled = laplacian(complex, &w.scaled(alpha), n)?.full;
        let dev = (&scaled - &reference).abs().max().as_f64();
        out.push(check(
            "scaling",
            Some(n),
            dev <= tol,
            dev,
            tol,
            format!("alpha {:.17e}", alpha.as_f64()),
        ));
    }
    Ok(out)
}

/// Merges per-dimension reports of one theorem.
pub fn merge_reports(theorem: &str, reports: Vec<VerificationReport>) -> VerificationReport {
    let mut out = VerificationReport::new(theorem);
    for r in reports {
        out.absorb(r);
    }
    out
}

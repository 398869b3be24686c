use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hodge::{Attribution, LaplacianBundle, SpectrumReport};
use crate::scalar::Real;

/// Column scaling applied to embedding coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedScaling {
    None,
    InverseSqrtEigenvalue,
}

/// Cell coordinates read from low eigenvectors: row `i` belongs to the cell
/// with index `i`, column `k` to `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct Embedding<T: Real> {
    pub dim: isize,
    pub eigenvalues: Vec<T>,
    pub coordinates: DMatrix<T>,
}

/// Flips `v` so its first entry above `1e-12 · max|v|` is positive.
pub fn orient<T: Real>(v: &mut DVector<T>) {
    let scale = v.amax();
    let floor = T::lit(1e-12) * scale;
    if let Some(&first) = v.iter().find(|x| x.abs() > floor) {
        if first < T::zero() {
            v.neg_mut();
        }
    }
}

fn is_constant<T: Real>(v: &DVector<T>) -> bool {
    let scale = v.amax();
    scale > T::zero() && v.iter().all(|&x| (x - v[0]).abs() <= T::lit(1e-8) * scale)
}

/// Spectral coordinates of the cells of dimension `bundle.dim`.
///
/// Uses the `d` eigenvectors with smallest eigenvalues after dropping the
/// bottom cluster when it is harmonic or consists of the constant cochain.
/// Each column is normalized to unit Euclidean length, then optionally
/// divided by `√λ`, then oriented with [`orient`].
pub fn spectral_embed<T: Real>(
    bundle: &LaplacianBundle<T>,
    report: &SpectrumReport<T>,
    d: usize,
    scaling: EmbedScaling,
) -> Result<Embedding<T>> {
    let size = bundle.size();
    if report.eigenvalues.len() != size || report.dim != bundle.dim {
        return Err(Error::DimensionMismatch { expected: size, found: report.eigenvalues.len() });
    }
    let skip = match report.clusters.first() {
        Some(c) if c.attribution == Attribution::Harmonic => c.multiplicity,
        Some(c) if c.multiplicity == 1 && is_constant(&report.eigenvector(0)) => 1,
        _ => 0,
    };
    let available = size - skip;
    if d > available || (d > 0 && d + 1 > size) {
        return Err(Error::InvalidInput(format!(
            "requested {d} components, only {available} available in dimension {}",
            bundle.dim
        )));
    }
    let mut coordinates = DMatrix::zeros(size, d);
    let mut eigenvalues = Vec::with_capacity(d);
    for k in 0..d {
        let lambda = report.eigenvalues[skip + k];
        let mut v = report.eigenvector(skip + k);
        let norm = v.norm();
        v /= norm;
        if scaling == EmbedScaling::InverseSqrtEigenvalue {
            if !(lambda > T::zero()) {
                return Err(Error::InvalidInput(
                    "inverse-sqrt scaling needs positive eigenvalues".into(),
                ));
            }
            v /= lambda.sqrt();
        }
        orient(&mut v);
        coordinates.set_column(k, &v);
        eigenvalues.push(lambda);
    }
    Ok(Embedding { dim: bundle.dim, eigenvalues, coordinates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexIndex;
    use crate::hodge::{laplacian, spectrum, DEFAULT_CLUSTER_TOL};
    use crate::weights::{independent_sequence_weights, IndependentModel};

    fn setup() -> (ComplexIndex, crate::weights::WeightFunction<f64>) {
        let c = ComplexIndex::full_sequence(2, 1).unwrap();
        let model = IndependentModel::sequence(vec![0.4, 0.6], 1e-12).unwrap();
        (c.clone(), independent_sequence_weights(&c, &model).unwrap())
    }

    #[test]
    fn drops_constant_cluster_and_orients() {
        let (c, w) = setup();
        let b = laplacian(&c, &w, 1).unwrap();
        let r = spectrum(&b, DEFAULT_CLUSTER_TOL).unwrap();
        let e = spectral_embed(&b, &r, 2, EmbedScaling::None).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| (l - 2.0).abs() < 1e-12));
        for col in e.coordinates.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
            assert!(col.iter().find(|x| x.abs() > 1e-12).unwrap() > &0.0);
        }
        assert_eq!(spectral_embed(&b, &r, 0, EmbedScaling::None).unwrap().coordinates.ncols(), 0);
        assert!(spectral_embed(&b, &r, 4, EmbedScaling::None).is_err());
    }

    #[test]
    fn invariant_under_weight_scaling() {
        let (c, w) = setup();
        let run = |w: &crate::weights::WeightFunction<f64>| {
            let b = laplacian(&c, w, 1).unwrap();
            let r = spectrum(&b, DEFAULT_CLUSTER_TOL).unwrap();
            spectral_embed(&b, &r, 3, EmbedScaling::InverseSqrtEigenvalue).unwrap().coordinates
        };
        let a = run(&w);
        let b = run(&w.scaled(1e3));
        assert!((a - b).abs().max() < 1e-9);
    }
}

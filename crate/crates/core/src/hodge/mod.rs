//! Coboundaries, weighted adjoints, Hodge Laplacians, their spectra and
//! Hodge decompositions.

mod coboundary;
mod decompose;
mod direct;
mod laplacian;
mod spectrum;

pub use coboundary::{coboundary_matrix, IncidenceMatrix};
pub use decompose::{hodge_decompose, HodgeProjector, HodgeSplit};
pub use direct::{
    combinatorial_laplacian, independent_sequence_laplacian_direct,
    sequence_laplacian_direct, simplicial_laplacian_direct,
};
pub use laplacian::{adjoint_matrix, laplacian, weighted_inner, weighted_norm, Cochain, LaplacianBundle};
pub use spectrum::{
    cluster_starts, sorted_eigenvalues, spectrum, Attribution, Cluster, SpectrumReport,
    DEFAULT_CLUSTER_TOL, DENSE_LIMIT,
};

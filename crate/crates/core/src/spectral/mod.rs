//! Explicit eigenbases of independent sequence models, theorem checks and
//! spectral embeddings.

mod eigenbasis;
mod embed;
mod verify;

pub use eigenbasis::{
    basis_matrix, predicted_spectrum, tensor_product, EigenbasisGenerator, LabeledEigenvector,
};
pub use embed::{orient, spectral_embed, EmbedScaling, Embedding};
pub use verify::{
    check_sequence_spectrum, merge_reports, verify_hodge, verify_scaling,
    verify_sequence_theorem, verify_simplicial_theorem, Check, VerificationReport,
};

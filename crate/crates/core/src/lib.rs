//! Weighted Hodge Laplacians on sequence and simplicial complexes.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the scalar type.

pub mod complex;
pub mod error;
pub mod hodge;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod spectral;
pub mod weights;

pub use complex::{Cell, CellKind, ComplexIndex, ComplexKind, VertexId};
pub use error::{Error, Result};
pub use scalar::Real;

pub type Distribution64 = weights::Distribution<f64>;
pub type Distribution32 = weights::Distribution<f32>;
pub type WeightFunction64 = weights::WeightFunction<f64>;
pub type WeightFunction32 = weights::WeightFunction<f32>;
pub type IndependentModel64 = weights::IndependentModel<f64>;
pub type IndependentModel32 = weights::IndependentModel<f32>;
pub type LaplacianBundle64 = hodge::LaplacianBundle<f64>;
pub type LaplacianBundle32 = hodge::LaplacianBundle<f32>;
pub type SpectrumReport64 = hodge::SpectrumReport<f64>;
pub type SpectrumReport32 = hodge::SpectrumReport<f32>;
pub type HodgeSplit64 = hodge::HodgeSplit<f64>;
pub type HodgeSplit32 = hodge::HodgeSplit<f32>;
pub type EigenbasisGenerator64 = spectral::EigenbasisGenerator<f64>;
pub type EigenbasisGenerator32 = spectral::EigenbasisGenerator<f32>;

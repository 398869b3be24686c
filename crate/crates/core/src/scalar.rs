//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt;

use nalgebra as na;
use num_traits as nt;

/// Real floating point type usable for weights, operators and spectra.
///
/// Implemented for `f32` and `f64`. Integer incidence data never goes
/// through this trait; it stays in `i64` so coboundary identities are exact.
pub trait Real:
    na::RealField + Copy + nt::FromPrimitive + nt::ToPrimitive + fmt::LowerExp + Send + Sync
{
    /// Converts an `f64` literal or tolerance into `Self`.
    fn lit(value: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(value).expect("finite literal")
    }

    /// Converts an integer count into `Self`.
    fn count(value: usize) -> Self {
        <Self as nt::FromPrimitive>::from_usize(value).expect("representable count")
    }

    /// Lossy conversion used for diagnostics and I/O.
    fn as_f64(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

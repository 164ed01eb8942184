//! Floating point abstraction shared by every numeric kernel.
//!
//! The solver only needs `sqrt`, the usual field arithmetic and FFT support,
//! so anything implementing [`Real`] (currently `f32` and `f64`) can be used.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Real scalar type usable for fields, operators and transforms.
pub trait Real:
    Float + FloatConst + FftNum + Sum + Display + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Lossy for `f32`.
    fn lit(x: f64) -> Self;

    /// Widens to `f64` for reporting.
    fn to_f64_lossy(self) -> f64;

    /// Relative precision used for round-off guards.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f64 {
    #[inline(always)]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline(always)]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

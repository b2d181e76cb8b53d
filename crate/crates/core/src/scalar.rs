//! Scalar abstraction for the numeric kernels.
//!
//! Everything numerical in this crate is generic over [`Real`], which is
//! satisfied by `f32` and `f64`. The pipeline-facing aliases at the crate
//! root pin `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float
    + FromPrimitive
    + NumAssign
    + LinalgScalar
    + ScalarOperand
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant, rounding when the target is narrower.
    fn cast(v: f64) -> Self {
        // from_f64 never fails for float targets.
        Self::from_f64(v).expect("f64 converts to any Real")
    }

    /// Converts a count. Counts in this crate stay far below 2^53.
    fn cast_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to any Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

//! Floating-point abstraction shared by every formula in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Real scalar the closed forms and estimators are written against.
///
/// Implemented for `f32` and `f64`. Tolerances that the crate documents in
/// absolute terms (1e-12 on the Lambert-W identity, 1e-9 on round trips) are
/// only attainable with `f64`; `f32` gets the same algorithms with
/// epsilon-scaled stopping rules.
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

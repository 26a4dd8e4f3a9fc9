//! Scalar abstraction: every numerical routine in this crate is generic over
//! [`Real`], instantiated as `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};
use rand::distributions::uniform::SampleUniform;

/// Floating-point scalar usable by the geometry, quadrature and sampling code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + SampleUniform
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts a tabulated `f64` constant into the scalar type.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("constant not representable in scalar type")
    }

    /// Lossy view of the scalar as `f64`, for diagnostics and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

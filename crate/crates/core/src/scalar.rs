//! Scalar abstraction shared by the special functions, the closed-form
//! optics model and the quadrature oracle.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type the numerical kernels are generic over.
///
/// Implemented for `f32` and `f64`. Accuracy contracts (for example the
/// 1e-10 bound on the Faddeeva function) are stated for `f64`; `f32`
/// evaluations carry single-precision accuracy.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts an index or count into `Self`.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

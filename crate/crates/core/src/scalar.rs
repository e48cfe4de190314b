//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Real floating point type the library is generic over: `f32` or `f64`.
///
/// Tolerances that depend on the precision live here so that the same code
/// checks hermiticity at `1e-12` in double precision and at a looser,
/// attainable level in single precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
    + sealed::Sealed
{
    /// Tolerance for structural tags: hermiticity, normalization, unit vectors.
    const STRUCTURAL_TOL: f64;
    /// A mean-spin magnitude below this is treated as zero.
    const DEGENERATE_TOL: f64;
    /// Convergence threshold for Jacobi sweeps (squared off-diagonal mass).
    const JACOBI_EPS: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const STRUCTURAL_TOL: f64 = 1e-12;
    const DEGENERATE_TOL: f64 = 1e-9;
    const JACOBI_EPS: f64 = 1e-32;
}

impl Real for f32 {
    const STRUCTURAL_TOL: f64 = 1e-5;
    const DEGENERATE_TOL: f64 = 1e-5;
    const JACOBI_EPS: f64 = 1e-14;
}

/// Complex number over [`Real`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

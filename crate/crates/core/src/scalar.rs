//! Scalar abstraction: every numerical routine in this crate is generic over a
//! real floating-point type. `f64` is the default used by the type aliases at
//! the crate root; `f32` instantiations compile and run with looser tolerances.

use num_complex::Complex;

/// Real scalar: f32 or f64.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::FloatConst
    + core::fmt::Debug
    + core::fmt::Display
    + core::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` constant (tolerance, table value, literal) into `Self`.
    fn lit(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("finite literal")
    }

    /// Lossy view as f64, for report emission and diagnostics.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate scalar.
pub type Cplx<T> = Complex<T>;

/// i, as a complex constant.
pub fn imag_unit<T: Real>() -> Cplx<T> {
    Complex::new(T::zero(), T::one())
}

/// e^{i phi}
pub fn cis<T: Real>(phi: T) -> Cplx<T> {
    Complex::new(phi.cos(), phi.sin())
}

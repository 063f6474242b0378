//! Scalar abstraction for the numerical core.

/// Floating-point scalar the core math is generic over.
///
/// Implemented for `f32` and `f64`. The tolerance-sensitive diagnostics
/// (fidelity susceptibility, norm-drift checks) only make sense in `f64`,
/// but the operator and state machinery works for both.
pub trait Float:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::NumAssign
    + num_traits::FromPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossy conversion of an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    fn half() -> Self {
        Self::of(0.5)
    }

    fn two() -> Self {
        Self::of(2.0)
    }
}

impl Float for f32 {}
impl Float for f64 {}

/// Complex number over a core scalar.
pub type Complex<T> = num_complex::Complex<T>;

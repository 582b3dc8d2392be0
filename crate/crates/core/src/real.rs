//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt;
use std::iter::Sum;

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// A real floating-point scalar usable for state vectors and linear algebra.
///
/// Implemented for `f32` and `f64`. Tolerances written for double precision
/// are passed through [`Real::tol`], which widens them to a few hundred ulps
/// when the type cannot resolve the requested precision.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + FloatConst
    + Default
    + Sum
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Widens a double-precision tolerance to something this type can resolve.
    fn tol(x: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(256.0);
        let t = Self::lit(x);
        if t > floor {
            t
        } else {
            floor
        }
    }

    fn nan() -> Self {
        Self::lit(f64::NAN)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the numeric core is generic over: `f32` or `f64`.
///
/// `Display`/`FromStr` must round-trip exactly; the model file relies on it.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Display
    + FromStr
    + Debug
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant, panicking only if the type cannot hold it.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

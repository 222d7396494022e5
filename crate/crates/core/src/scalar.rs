//! The real scalar type the solvers are generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by every routine in the crate.
///
/// Implemented for `f32` and `f64`. Random draws are always made in `f64`
/// and converted, so a given seed describes the same problem for both widths.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

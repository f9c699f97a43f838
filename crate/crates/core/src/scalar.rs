//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real floating-point scalar (`f32` or `f64`) the solvers are generic over.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Maps an absolute tolerance calibrated for `f64` onto this type.
    ///
    /// Tolerances at or above the square root of the machine epsilon are
    /// kept as-is; tighter ones are raised so that single precision does not
    /// chase unreachable targets.
    fn tol(x: f64) -> Self {
        let ratio = (Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON).sqrt();
        Self::lit(x * ratio.max(1.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

//! Scalar abstraction the numeric core is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
///
/// The fitting kernels, the eigen solver, and the synthetic generators are
/// written against this trait. Everything downstream (CLI, experiment
/// drivers) instantiates with `f64`; the crate root exports those aliases.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Convert a configuration constant.
    fn from64(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }

    /// Widen to `f64` for reporting and serialization.
    fn to64(self) -> f64 {
        self.to_f64().expect("scalar fits in f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

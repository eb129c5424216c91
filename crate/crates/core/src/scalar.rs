use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the simulator, encoder, surrogate and search are generic over.
///
/// Implemented for `f32` and `f64`. Classical-side quantities (native hyperparameter
/// values, raw scores, timings) stay `f64` regardless of the choice here.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal or configuration value.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 is representable in every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

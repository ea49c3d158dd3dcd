//! Scalar abstraction: every numerical routine in this crate is generic over
//! [`Real`], which is `num_traits::Float` plus the conversion and formatting
//! bounds the solvers actually need.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the solvers (`f32`, `f64`).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Shorthand for lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal conversion")
    }

    /// Lossy conversion to `f64` (for reporting and CSV output).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Conversion from a node/branch count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count conversion")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
}

//! Scalar abstraction for the probability arithmetic.
//!
//! The security-parameter math is written against this trait so it can run in
//! f32 or f64; the pipeline and CLI use the f64 aliases exported from the
//! crate root.

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

pub trait Real: Float + FromPrimitive + NumAssign + Sum + Debug + Send + Sync + 'static {
    /// Lossy conversion used when handing results to f64-only consumers.
    fn to_f64_lossy(self) -> f64;

    /// Shorthand for lifting literal constants into the scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

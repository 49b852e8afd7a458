//! The scalar abstraction the IFS layer is written against.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed};

/// A field-like number type: exact rationals, `f64` or `f32`.
pub trait Scalar: Clone + PartialOrd + Num + Signed + FromPrimitive + Debug + Send + Sync {
    fn from_u64_exact(n: u64) -> Self {
        Self::from_u64(n).expect("u64 fits in every scalar")
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_u64_exact(num) / Self::from_u64_exact(den)
    }
}

impl<T> Scalar for T where T: Clone + PartialOrd + Num + Signed + FromPrimitive + Debug + Send + Sync {}

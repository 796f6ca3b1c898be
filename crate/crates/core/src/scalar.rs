//! Numeric abstraction shared by every computation in the crate.
//!
//! All combinatorial and analytical code is written once against [`Scalar`]
//! and instantiated with `f64` for sweeps, `f32` for small instances, and
//! [`BigRational`] when identities must hold exactly.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// Field-like scalar used for probabilities and expectations.
pub trait Scalar:
    Num + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    /// Tolerance used when checking that a pmf sums to one.
    fn normalization_tolerance() -> Self;

    fn from_count(n: u128) -> Self;

    fn ratio(num: u128, den: u128) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn approx_eq(&self, other: &Self, tol: &Self) -> bool {
        self.abs_diff(other) <= *tol
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn normalization_tolerance() -> Self {
        1e-9
    }

    fn from_count(n: u128) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn normalization_tolerance() -> Self {
        1e-4
    }

    fn from_count(n: u128) -> Self {
        n as f32
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn normalization_tolerance() -> Self {
        BigRational::zero()
    }

    fn from_count(n: u128) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Sums an iterator of scalars.
pub fn sum<T: Scalar>(items: impl IntoIterator<Item = T>) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x)
}

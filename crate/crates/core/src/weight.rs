//! Agent counts.
//!
//! Every solver is written against [`Weight`], which any unsigned primitive
//! integer satisfies. The crate root exposes `u64` aliases for everyday use.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;

use num_traits::{PrimInt, Unsigned};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// A non-negative integer number of agents.
pub trait Weight:
    PrimInt
    + Unsigned
    + Sum
    + Hash
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts from `u64`, panicking if the value does not fit.
    fn of(value: u64) -> Self {
        Self::from(value).unwrap_or_else(|| panic!("{value} does not fit the weight type"))
    }

    /// Lossless widening used for reporting and ratios.
    fn as_u128(self) -> u128 {
        self.to_u128()
            .expect("unsigned weights always widen to u128")
    }

    /// `self - other`, clamped at zero.
    fn saturating_diff(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::zero()
        }
    }
}

impl<T> Weight for T where
    T: PrimInt
        + Unsigned
        + Sum
        + Hash
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static
{
}

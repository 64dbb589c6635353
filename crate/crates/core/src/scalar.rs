//! Coefficient types for the polynomial engine.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num};

/// A field-like coefficient type.
///
/// Exact types (`BigRational`, `Rational64`) give exact zero tests, which every
/// constraint and decomposition routine relies on. `f64` is accepted for quick
/// numeric evaluation but its zero tests are only as good as the rounding.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Num
    + Neg<Output = Self>
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    /// Builds `num / den`. `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits") / Self::from_i64(den).expect("integer fits")
    }

    /// Parses a coefficient literal such as `3`, `-2` or `3/2`.
    fn parse_literal(text: &str) -> Option<Self>;
}

impl Scalar for BigRational {
    fn parse_literal(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                if d == BigInt::from(0) {
                    return None;
                }
                Some(Ratio::new(n, d))
            }
            None => Some(Ratio::from_integer(text.trim().parse().ok()?)),
        }
    }
}

impl Scalar for Ratio<i64> {
    fn parse_literal(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some((n, d)) => {
                let d: i64 = d.trim().parse().ok()?;
                if d == 0 {
                    return None;
                }
                Some(Ratio::new(n.trim().parse().ok()?, d))
            }
            None => Some(Ratio::from_integer(text.trim().parse().ok()?)),
        }
    }
}

impl Scalar for f64 {
    fn parse_literal(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some((n, d)) => Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?),
            None => text.trim().parse().ok(),
        }
    }
}

impl Scalar for f32 {
    fn parse_literal(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some((n, d)) => Some(n.trim().parse::<f32>().ok()? / d.trim().parse::<f32>().ok()?),
            None => text.trim().parse().ok(),
        }
    }
}

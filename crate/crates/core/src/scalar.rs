//! Scalar abstraction shared by the geometry, semiring and search layers.
//!
//! Floating-point types use a relative orientation tolerance; exact rational
//! types use a zero tolerance so every sign decision is exact.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type the core algorithms are generic over.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Relative tolerance applied to orientation tests. Zero for exact types.
    fn geom_eps() -> Self;

    /// `false` for NaN and infinities.
    fn is_finite_value(&self) -> bool;

    /// Converts an `f64`, rejecting non-finite input.
    fn from_f64_checked(v: f64) -> Option<Self> {
        if v.is_finite() {
            Self::from_f64(v)
        } else {
            None
        }
    }

    /// Lossy conversion used for reporting.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    fn geom_eps() -> Self {
        1e-9
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn geom_eps() -> Self {
        // roughly 8 ulps at unit scale
        1e-6
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational64 {
    fn geom_eps() -> Self {
        Rational64::from_integer(0)
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

impl Scalar for BigRational {
    fn geom_eps() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(f64::from_f64_checked(f64::NAN).is_none());
        assert!(f64::from_f64_checked(f64::INFINITY).is_none());
        assert_eq!(f64::from_f64_checked(2.5), Some(2.5));
        assert_eq!(
            Rational64::from_f64_checked(0.5),
            Some(Rational64::new(1, 2))
        );
    }

    #[test]
    fn exact_types_have_zero_tolerance() {
        assert_eq!(Rational64::geom_eps(), Rational64::from_integer(0));
        assert!(BigRational::geom_eps() == BigRational::from_integer(0.into()));
        assert!(f64::geom_eps() > 0.0);
    }
}

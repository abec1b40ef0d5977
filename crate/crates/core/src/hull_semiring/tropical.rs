use super::Semiring;
use crate::scalar::Scalar;

/// Max-plus value. `None` stands for `-∞`, the additive identity, so the
/// semiring also works over exact types without an infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalValue<T>(pub Option<T>);

impl<T: Scalar> TropicalValue<T> {
    pub fn new(score: T) -> Self {
        Self(Some(score))
    }

    pub fn score(&self) -> Option<&T> {
        self.0.as_ref()
    }
}

impl<T: Scalar> Semiring for TropicalValue<T> {
    fn zero() -> Self {
        Self(None)
    }

    fn one() -> Self {
        Self(Some(T::zero()))
    }

    fn plus(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (None, x) | (x, None) => Self(x.clone()),
            (Some(a), Some(b)) => Self(Some(if b > a { b.clone() } else { a.clone() })),
        }
    }

    fn times(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Some(a), Some(b)) => Self(Some(a.clone() + b.clone())),
            _ => Self(None),
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities() {
        let a = TropicalValue::new(2.5f64);
        assert_eq!(a.plus(&TropicalValue::zero()), a);
        assert_eq!(a.times(&TropicalValue::one()), a);
        assert!(a.times(&TropicalValue::zero()).is_zero());
        assert_eq!(a.plus(&TropicalValue::new(-1.0)), a);
        assert_eq!(a.times(&TropicalValue::new(-1.0)), TropicalValue::new(1.5));
    }
}

//! Scalar types the solver can run on.
//!
//! Every comparison the algorithm makes is an exact equality or ordering test
//! (first-choice edges are defined by `u_i = v_ij - p_j`), so only exact
//! number types are admitted. Floating point is deliberately not implemented.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// An exact, totally ordered number type closed under `+`, `-` and `*`.
///
/// Integers qualify: a market whose data are all integers stays integral
/// throughout a solver run, because every price step is a difference of
/// input values.
pub trait Scalar: Num + Clone + Ord + Hash + Debug + Display + Send + Sync + 'static {
    fn from_i64(value: i64) -> Self;

    /// The value as an `i64`, if it is an integer that fits.
    fn to_i64_exact(&self) -> Option<i64>;

    fn is_integral(&self) -> bool;
}

/// A [`Scalar`] whose division is exact. Required wherever the crate divides
/// (the generalized-utility reduction).
pub trait Field: Scalar {}

macro_rules! impl_scalar_for_int {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_i64(value: i64) -> Self {
                value as $t
            }

            fn to_i64_exact(&self) -> Option<i64> {
                i64::try_from(*self).ok()
            }

            fn is_integral(&self) -> bool {
                true
            }
        }
    )*};
}

impl_scalar_for_int!(i64, i128);

impl Scalar for BigInt {
    fn from_i64(value: i64) -> Self {
        BigInt::from(value)
    }

    fn to_i64_exact(&self) -> Option<i64> {
        self.to_i64()
    }

    fn is_integral(&self) -> bool {
        true
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Scalar + Integer,
{
    fn from_i64(value: i64) -> Self {
        Ratio::from_integer(T::from_i64(value))
    }

    fn to_i64_exact(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64_exact()
        } else {
            None
        }
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl<T> Field for Ratio<T> where T: Scalar + Integer {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn assert_scalar<S: Scalar>() {}
    fn assert_field<F: Field>() {}

    #[test]
    fn supported_types() {
        assert_scalar::<i64>();
        assert_scalar::<i128>();
        assert_scalar::<BigInt>();
        assert_field::<Ratio<i64>>();
        assert_field::<BigRational>();
    }

    #[test]
    fn integral_detection() {
        let half = BigRational::new(1.into(), 2.into());
        assert!(!half.is_integral());
        assert_eq!(half.to_i64_exact(), None);
        let four = BigRational::new(8.into(), 2.into());
        assert!(four.is_integral());
        assert_eq!(four.to_i64_exact(), Some(4));
        assert_eq!(<i128 as Scalar>::to_i64_exact(&(1i128 << 80)), None);
    }
}

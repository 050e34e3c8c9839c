//! Exact rational arithmetic for edge weights, imbalances and Lyapunov values.
//!
//! Every quantity in this crate is an [`ExactWeight`]: an arbitrary-precision
//! rational kept in reduced form. There is no floating point anywhere, so
//! balance conditions, row/column sums and protocol invariants can be tested
//! with `==`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact nonnegative-or-signed rational number.
///
/// Internally a reduced `BigRational`; construction through any public path
/// keeps the denominator positive and the fraction in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactWeight(BigRational);

impl ExactWeight {
    pub fn zero() -> Self {
        ExactWeight(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactWeight(BigRational::one())
    }

    pub fn from_integer(value: i64) -> Self {
        ExactWeight(BigRational::from_integer(BigInt::from(value)))
    }

    /// Builds `numerator / denominator`. The denominator must be nonzero.
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator != 0, "denominator must be nonzero");
        ExactWeight(BigRational::new(
            BigInt::from(numerator),
            BigInt::from(denominator),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExactWeight(self.0.abs())
    }

    /// True when the value is an integer (denominator 1 in reduced form).
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn reciprocal(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        ExactWeight(self.0.recip())
    }

    /// Converts to `f64`, for reporting only (benchmark fits, summaries).
    pub fn to_f64(&self) -> f64 {
        let num = self.0.numer();
        let den = self.0.denom();
        // Good enough for small report values; exactness is never needed here.
        num.to_string().parse::<f64>().unwrap_or(f64::NAN)
            / den.to_string().parse::<f64>().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactWeight {
    /// Renders `num/den`, or just `num` for integers. Exact, never decimal.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for ExactWeight {
    type Err = Error;

    /// Parses `"num"` or `"num/den"` with optional sign on the numerator.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::BadWeight {
            text: s.to_string(),
        };
        let mut parts = s.splitn(2, '/');
        let numer = parts
            .next()
            .and_then(|p| BigInt::from_str(p.trim()).ok())
            .ok_or_else(bad)?;
        let denom = match parts.next() {
            Some(p) => BigInt::from_str(p.trim()).map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(ExactWeight(BigRational::new(numer, denom)))
    }
}

impl Serialize for ExactWeight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactWeight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactWeight {
            type Output = ExactWeight;
            fn $method(self, rhs: ExactWeight) -> ExactWeight {
                ExactWeight((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactWeight> for ExactWeight {
            type Output = ExactWeight;
            fn $method(self, rhs: &'a ExactWeight) -> ExactWeight {
                ExactWeight((self.0).$method(&rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b ExactWeight> for &'a ExactWeight {
            type Output = ExactWeight;
            fn $method(self, rhs: &'b ExactWeight) -> ExactWeight {
                ExactWeight((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for ExactWeight {
    type Output = ExactWeight;
    fn div(self, rhs: ExactWeight) -> ExactWeight {
        assert!(!rhs.is_zero(), "division by zero weight");
        ExactWeight(self.0 / rhs.0)
    }
}

impl Div<&ExactWeight> for &ExactWeight {
    type Output = ExactWeight;
    fn div(self, rhs: &ExactWeight) -> ExactWeight {
        assert!(!rhs.is_zero(), "division by zero weight");
        ExactWeight(&self.0 / &rhs.0)
    }
}

impl Neg for ExactWeight {
    type Output = ExactWeight;
    fn neg(self) -> ExactWeight {
        ExactWeight(-self.0)
    }
}

impl AddAssign for ExactWeight {
    fn add_assign(&mut self, rhs: ExactWeight) {
        self.0 += rhs.0;
    }
}

impl<'a> AddAssign<&'a ExactWeight> for ExactWeight {
    fn add_assign(&mut self, rhs: &'a ExactWeight) {
        self.0 += &rhs.0;
    }
}

impl SubAssign for ExactWeight {
    fn sub_assign(&mut self, rhs: ExactWeight) {
        self.0 -= rhs.0;
    }
}

impl<'a> SubAssign<&'a ExactWeight> for ExactWeight {
    fn sub_assign(&mut self, rhs: &'a ExactWeight) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign for ExactWeight {
    fn mul_assign(&mut self, rhs: ExactWeight) {
        self.0 *= rhs.0;
    }
}

impl DivAssign for ExactWeight {
    fn div_assign(&mut self, rhs: ExactWeight) {
        assert!(!rhs.is_zero(), "division by zero weight");
        self.0 /= rhs.0;
    }
}

impl Sum for ExactWeight {
    fn sum<I: Iterator<Item = ExactWeight>>(iter: I) -> ExactWeight {
        iter.fold(ExactWeight::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a ExactWeight> for ExactWeight {
    fn sum<I: Iterator<Item = &'a ExactWeight>>(iter: I) -> ExactWeight {
        iter.fold(ExactWeight::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for ExactWeight {
    fn from(value: i64) -> Self {
        ExactWeight::from_integer(value)
    }
}

impl From<usize> for ExactWeight {
    fn from(value: usize) -> Self {
        ExactWeight(BigRational::from_integer(BigInt::from(value)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["0", "1", "-3", "3/2", "-7/5", "10/4"] {
            let w: ExactWeight = text.parse().unwrap();
            let again: ExactWeight = w.to_string().parse().unwrap();
            assert_eq!(w, again);
        }
        // reduced form
        let w: ExactWeight = "10/4".parse().unwrap();
        assert_eq!(w.to_string(), "5/2");
    }

    #[test]
    fn rejects_malformed_weights() {
        for text in ["", "a", "1/0", "1/2/3", "1.5"] {
            assert!(text.parse::<ExactWeight>().is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn exact_arithmetic() {
        let third = ExactWeight::new(1, 3);
        let sum = third.clone() + third.clone() + third.clone();
        assert_eq!(sum, ExactWeight::one());
        assert_eq!(
            ExactWeight::new(5, 6) - ExactWeight::new(1, 2),
            ExactWeight::new(1, 3)
        );
        assert_eq!(
            ExactWeight::new(2, 3) * ExactWeight::new(9, 4),
            ExactWeight::new(3, 2)
        );
    }

    #[test]
    fn denominator_stays_positive() {
        let w = ExactWeight::new(1, -2);
        assert_eq!(w.to_string(), "-1/2");
        assert!(w.denominator() > &BigInt::from(0));
    }
}

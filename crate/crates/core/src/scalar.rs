//! Scalar types for cochain values.
//!
//! Exact work uses rationals; the float impls exist for quick exploratory
//! averages where exactness is not needed.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialEq + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `numer / denom`; `denom` must be nonzero.
    fn ratio(numer: i64, denom: i64) -> Self;

    fn is_integral(&self) -> bool;

    fn approx(&self) -> f64;

    /// Parses `p`, `-p` or `p/q`.
    fn parse_scalar(text: &str) -> Option<Self>;
}

fn split_ratio(text: &str) -> Option<(i64, i64)> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then_some(())?;
            Some((n.trim().parse().ok()?, d))
        }
        None => Some((text.parse().ok()?, 1)),
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn ratio(numer: i64, denom: i64) -> Self {
                numer as $f / denom as $f
            }

            fn is_integral(&self) -> bool {
                let eps = <$f>::EPSILON * 64.0 * self.abs().max(1.0);
                (self - self.round()).abs() <= eps
            }

            fn approx(&self) -> f64 {
                *self as f64
            }

            fn parse_scalar(text: &str) -> Option<Self> {
                if let Some((n, d)) = split_ratio(text) {
                    return Some(Self::ratio(n, d));
                }
                text.trim().parse().ok()
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Ratio<i64> {
    fn ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn parse_scalar(text: &str) -> Option<Self> {
        split_ratio(text).map(|(n, d)| Ratio::new(n, d))
    }
}

impl Scalar for BigRational {
    fn ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn parse_scalar(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let d: BigInt = d.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(Ratio::new(n.trim().parse().ok()?, d))
            }
            None => Some(Ratio::from_integer(text.parse().ok()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrality_per_type() {
        assert!(BigRational::ratio(14, 7).is_integral());
        assert!(!BigRational::ratio(1, 7).is_integral());
        assert!(Ratio::<i64>::ratio(-6, 3).is_integral());
        assert!(3.0_f64.is_integral());
        assert!(!0.5_f32.is_integral());
    }

    #[test]
    fn parses_fractions() {
        assert_eq!(BigRational::parse_scalar("-3/9"), Some(BigRational::ratio(-1, 3)));
        assert_eq!(Ratio::<i64>::parse_scalar(" 5 "), Some(Ratio::from_integer(5)));
        assert_eq!(f64::parse_scalar("1/4"), Some(0.25));
        assert_eq!(BigRational::parse_scalar("1/0"), None);
    }
}

//! Abstraction over the number types the geometry and measure code runs on.
//!
//! Torus and finite models are normally instantiated with [`Rational`] so
//! that line-sum identities hold with equality. Monte Carlo estimation and
//! the affine probe run on `f64`.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Arbitrary precision rational, the exact scalar of the crate.
pub type Rational = BigRational;

/// Number type usable as a coordinate, a measure and a flow capacity.
///
/// Automatically provides ordering helpers; implementors only supply the
/// handful of conversions that `num_traits` does not cover.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// `num / den`; `den` must be nonzero.
    fn ratio(num: i64, den: i64) -> Self;

    /// Largest integer not exceeding `self`.
    fn floor_value(&self) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Nearest representable value to `x`.
    fn from_f64_lossy(x: f64) -> Self;

    /// Denominator in lowest terms, if the type has one.
    fn denominator_u64(&self) -> Option<u64> {
        None
    }

    /// JSON encoding: numbers for floats, `"p/q"` strings for rationals.
    fn to_json(&self) -> Value;

    fn from_json(value: &Value) -> Option<Self>;

    /// Reduce into `[0, 1)`.
    fn fract_unit(&self) -> Self {
        let r = self.clone() - self.floor_value();
        // floating point can round `x - floor(x)` up to exactly 1
        if r >= Self::one() {
            Self::zero()
        } else {
            r
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits scalar")
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn floor_value(&self) -> Self {
                self.floor()
            }

            fn from_f64_lossy(x: f64) -> Self {
                x as $t
            }

            fn to_json(&self) -> Value {
                serde_json::Number::from_f64(*self as f64)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }

            fn from_json(value: &Value) -> Option<Self> {
                match value {
                    Value::Number(n) => n.as_f64().map(|x| x as $t),
                    Value::String(s) => parse_ratio_str(s).map(|r| r.to_f64_lossy() as $t),
                    _ => None,
                }
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn from_f64_lossy(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn denominator_u64(&self) -> Option<u64> {
        self.denom().to_u64()
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(value: &Value) -> Option<Self> {
        match value {
            Value::String(s) => parse_ratio_str(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Some(BigRational::from_integer(BigInt::from(i)))
                } else {
                    n.as_f64().and_then(BigRational::from_float)
                }
            }
            _ => None,
        }
    }
}

/// Parses `"p"`, `"p/q"` or a decimal literal such as `"-0.25"`.
pub fn parse_ratio_str(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_abs.is_empty() { "0" } else { whole_abs }, frac);
        let mut num: BigInt = digits.parse().ok()?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(num, den));
    }
    let p: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(p))
}

/// Least common multiple of the denominators of `values`, `None` for
/// inexact scalars or on overflow.
pub fn common_denominator<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<u64> {
    let mut acc: u64 = 1;
    for v in values {
        let d = v.denominator_u64()?;
        acc = num_integer::lcm(acc, d);
        if acc > (1 << 40) {
            return None;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_ratio_str("3/12"), Some(Rational::ratio(1, 4)));
        assert_eq!(parse_ratio_str("-0.25"), Some(Rational::ratio(-1, 4)));
        assert_eq!(parse_ratio_str("7"), Some(Rational::ratio(7, 1)));
        assert_eq!(parse_ratio_str("1/0"), None);
    }

    #[test]
    fn fract_unit_is_in_range() {
        assert_eq!(Rational::ratio(-1, 4).fract_unit(), Rational::ratio(3, 4));
        assert_eq!(Rational::ratio(5, 4).fract_unit(), Rational::ratio(1, 4));
        let x = (-1e-20f64).fract_unit();
        assert!((0.0..1.0).contains(&x));
    }

    #[test]
    fn json_round_trip() {
        let r = Rational::ratio(-7, 32);
        assert_eq!(Rational::from_json(&r.to_json()), Some(r));
        assert_eq!(f64::from_json(&0.375f64.to_json()), Some(0.375));
    }

    #[test]
    fn denominators() {
        let vals = [Rational::ratio(1, 4), Rational::ratio(1, 6)];
        assert_eq!(common_denominator(vals), Some(12));
        assert_eq!(common_denominator([0.5f64]), None);
    }
}

//! Scalar abstraction for lengths, prices, power and ratios.
//!
//! Every quantity in the plant model (chainage, cost, watts, reserve
//! fractions, spanning-tree path costs) is carried as a [`Scalar`]. The
//! trait is implemented for `f32`, `f64` and the exact rational
//! `Ratio<i64>`, so the same planning code can run in floating point or
//! exactly.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric type the plant model is generic over.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts a document value (always `f64` on disk) into this scalar.
    ///
    /// Exact types read the shortest decimal representation of `value`, so
    /// `0.2` becomes `1/5` rather than the binary expansion of the float.
    fn from_document(value: f64) -> Option<Self>;

    /// Lossy conversion back to `f64` for documents and reports.
    fn to_document(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest integer not below `self`, saturating at zero for negatives.
    fn ceil_count(self) -> u64;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in scalar")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn midpoint(a: Self, b: Self) -> Self {
        (a + b) / Self::two()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn sum_of<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Scalar for f64 {
    fn from_document(value: f64) -> Option<Self> {
        value.is_finite().then_some(value)
    }

    fn ceil_count(self) -> u64 {
        if self <= 0.0 {
            0
        } else {
            self.ceil() as u64
        }
    }
}

impl Scalar for f32 {
    fn from_document(value: f64) -> Option<Self> {
        let v = value as f32;
        v.is_finite().then_some(v)
    }

    fn ceil_count(self) -> u64 {
        if self <= 0.0 {
            0
        } else {
            self.ceil() as u64
        }
    }
}

impl Scalar for Ratio<i64> {
    fn from_document(value: f64) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        parse_decimal(&format!("{value}"))
    }

    fn ceil_count(self) -> u64 {
        let c = self.ceil().to_integer();
        if c <= 0 {
            0
        } else {
            c as u64
        }
    }
}

/// Parses a plain decimal literal (`-12.375`, `1e-3` is not accepted) into a ratio.
fn parse_decimal(text: &str) -> Option<Ratio<i64>> {
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut numer: i64 = 0;
    let mut denom: i64 = 1;
    for c in int_part.chars() {
        let d = c.to_digit(10)? as i64;
        numer = numer.checked_mul(10)?.checked_add(d)?;
    }
    for c in frac_part.chars() {
        let d = c.to_digit(10)? as i64;
        numer = numer.checked_mul(10)?.checked_add(d)?;
        denom = denom.checked_mul(10)?;
    }
    if negative {
        numer = -numer;
    }
    Some(Ratio::new(numer, denom))
}

/// Newtype used by report writers to render any scalar the same way.
#[derive(Debug, Clone, Copy)]
pub struct Fmt<S>(pub S);

impl<S: Scalar> Display for Fmt<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.0.to_document();
        if v.fract() == 0.0 && v.abs() < 1e15 {
            write!(f, "{}", v as i64)
        } else {
            let s = format!("{v:.6}");
            write!(f, "{}", s.trim_end_matches('0').trim_end_matches('.'))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_scalar_reads_short_decimals() {
        assert_eq!(Ratio::<i64>::from_document(0.2), Some(Ratio::new(1, 5)));
        assert_eq!(Ratio::<i64>::from_document(-12.5), Some(Ratio::new(-25, 2)));
        assert_eq!(Ratio::<i64>::from_document(90.0), Some(Ratio::from_integer(90)));
        assert_eq!(Ratio::<i64>::from_document(f64::NAN), None);
    }

    #[test]
    fn ceil_count_saturates() {
        assert_eq!(2.19f64.ceil_count(), 3);
        assert_eq!((-1.0f64).ceil_count(), 0);
        assert_eq!(Ratio::new(7i64, 3).ceil_count(), 3);
        assert_eq!(2.0f32.ceil_count(), 2);
    }

    #[test]
    fn rendering_trims_zeros() {
        assert_eq!(Fmt(70.0f64).to_string(), "70");
        assert_eq!(Fmt(0.25f64).to_string(), "0.25");
        assert_eq!(Fmt(Ratio::new(1i64, 3)).to_string(), "0.333333");
    }
}

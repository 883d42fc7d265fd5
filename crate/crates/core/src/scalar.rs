//! Numeric backends: exact arbitrary-precision rationals and binary64 floats.
//!
//! Every kernel and matrix routine is generic over [`Scalar`], so the same
//! code path runs exactly (for identities that must hold to zero) or in
//! floating point (for eigenproblems).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Backend {
    #[serde(rename = "rational")]
    ExactRational,
    #[serde(rename = "float")]
    Float64,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::ExactRational => "rational",
            Backend::Float64 => "float",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rational" | "exact" => Ok(Backend::ExactRational),
            "float" | "f64" => Ok(Backend::Float64),
            other => Err(format!(
                "unknown backend {other:?} (expected \"rational\" or \"float\")"
            )),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const BACKEND: Backend;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// `p/q` for rationals, shortest round-trip decimal for floats.
    fn render(&self) -> String;

    /// `h^(-mu)` for a rational step and order `num/den`.
    fn inv_pow(h: &BigRational, num: i64, den: i64) -> Result<Self>;
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float64;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        (*self).abs()
    }

    fn render(&self) -> String {
        // `-0` would otherwise leak into goldens
        if *self == 0.0 {
            "0".to_string()
        } else {
            format!("{self}")
        }
    }

    fn inv_pow(h: &BigRational, num: i64, den: i64) -> Result<Self> {
        let h = Self::from_rational(h);
        if num == den {
            Ok(1.0 / h)
        } else {
            Ok(h.powf(-(num as f64) / den as f64))
        }
    }
}

impl Scalar for BigRational {
    const BACKEND: Backend = Backend::ExactRational;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn inv_pow(h: &BigRational, num: i64, den: i64) -> Result<Self> {
        let irrational = || Error::IrrationalScale {
            h: h.to_string(),
            mu: format!("{num}/{den}"),
        };
        if h.is_one() {
            return Ok(BigRational::one());
        }
        let root = exact_root(h, den as u32).ok_or_else(irrational)?;
        let pow = num_traits::pow(root, num as usize);
        Ok(pow.recip())
    }
}

/// Exact `den`-th root of a positive rational, if one exists.
fn exact_root(h: &BigRational, den: u32) -> Option<BigRational> {
    if !h.is_positive() {
        return None;
    }
    let n = h.numer().nth_root(den);
    let d = h.denom().nth_root(den);
    if num_traits::pow(n.clone(), den as usize) == *h.numer()
        && num_traits::pow(d.clone(), den as usize) == *h.denom()
    {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal literal (`"0.999"`, `"1e-3"`)
/// into an exact rational.
pub fn parse_rational(text: &str) -> std::result::Result<BigRational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..]
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(format!("not a number: {s:?}"));
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().unwrap_or_default();
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("0.999").unwrap(), q(999, 1000));
        assert_eq!(parse_rational("-3").unwrap(), q(-3, 1));
        assert_eq!(parse_rational("2.5e-1").unwrap(), q(1, 4));
        assert_eq!(parse_rational("1E2").unwrap(), q(100, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn exact_inverse_powers() {
        assert_eq!(BigRational::inv_pow(&q(1, 4), 1, 2).unwrap(), q(2, 1));
        assert_eq!(BigRational::inv_pow(&q(8, 27), 2, 3).unwrap(), q(9, 4));
        assert_eq!(BigRational::inv_pow(&q(1, 1), 1, 3).unwrap(), q(1, 1));
        assert!(matches!(
            BigRational::inv_pow(&q(2, 1), 1, 2),
            Err(Error::IrrationalScale { .. })
        ));
        assert!((f64::inv_pow(&q(2, 1), 1, 2).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn renders() {
        assert_eq!(q(-1, 2).render(), "-1/2");
        assert_eq!(q(4, 2).render(), "2");
        assert_eq!((-0.0f64).render(), "0");
        assert_eq!(0.1f64.render(), "0.1");
    }
}

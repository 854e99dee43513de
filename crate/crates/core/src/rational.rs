//! Exact probabilities and parameter literals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Exact output distribution of a stochastic operator.
pub type Distribution = BTreeMap<BitString, BigRational>;

/// Largest genome length for which exact operator distributions are produced.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10;

/// An exact rational operator parameter such as a mutation rate or a crossover bias.
///
/// Parsed from decimal (`0.25`) or fraction (`1/4`) literals so that the exact
/// oracles see precisely the value the sampler uses.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(Rational64);

impl Rate {
    pub fn new(numer: i64, denom: i64) -> Self {
        Rate(Rational64::new(numer, denom))
    }

    pub fn zero() -> Self {
        Rate(Rational64::zero())
    }

    pub fn one() -> Self {
        Rate(Rational64::one())
    }

    pub fn inner(&self) -> Rational64 {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.0.numer()), BigInt::from(*self.0.denom()))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn in_unit_interval(&self) -> bool {
        self.0 >= Rational64::zero() && self.0 <= Rational64::one()
    }
}

impl From<Rational64> for Rate {
    fn from(r: Rational64) -> Self {
        Rate(r)
    }
}

impl FromStr for Rate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            return Ok(Rate(Rational64::new(num, den)));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if frac_part.len() > 17 {
            return Err(Error::Parse(format!("too many decimal places: {s:?}")));
        }
        let denom = 10i64.pow(frac_part.len() as u32);
        let int_val: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
        let frac_val: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
        let numer = int_val
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        Ok(Rate(Rational64::new(if neg { -numer } else { numer }, denom)))
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rate({self})")
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
pub(crate) fn big_ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn add_mass(dist: &mut Distribution, y: BitString, p: BigRational) {
    if p.is_zero() {
        return;
    }
    dist.entry(y)
        .and_modify(|q| *q += &p)
        .or_insert(p);
}

/// Sum of all probabilities in a distribution.
pub fn total_mass(dist: &Distribution) -> BigRational {
    dist.values().fold(BigRational::zero(), |acc, p| acc + p)
}

/// `base^exp` for a rational base and a non-negative integer exponent.
pub(crate) fn pow(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

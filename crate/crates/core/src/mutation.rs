//! Unbiased mutation operators.
//!
//! Every operator draws a flip count `K` from a kind-specific law and flips a
//! uniformly random `K`-subset of positions, which makes it unbiased by
//! construction. The expected flip count is the operator's `chi`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::bitstring::BitString;
use crate::error::{capability, usage, Error, Result};
use crate::rational::{add_mass, big, pow, Distribution, Rate, DEFAULT_ENUMERATION_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationKind {
    /// Flip each bit independently with probability `rate`.
    StandardBit { rate: Rate },
    /// Flip exactly `k` distinct positions.
    KBitFlip { k: usize },
    /// Draw `K` in `[1, n]` with `P(K = k)` proportional to `k^-tau`, then flip `K` positions.
    HeavyTailed { tau: Rate },
}

/// A mutation operator bound to a genome length.
#[derive(Clone, Debug)]
pub struct MutationOp {
    kind: MutationKind,
    n: usize,
    heavy_sampler: Option<WeightedIndex<f64>>,
}

impl PartialEq for MutationOp {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.n == other.n
    }
}

impl MutationOp {
    pub fn standard_bit(rate: Rate, n: usize) -> Result<Self> {
        if !rate.in_unit_interval() {
            return usage(format!("mutation rate {rate} outside [0, 1]"));
        }
        Self::build(MutationKind::StandardBit { rate }, n)
    }

    pub fn k_bit_flip(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return usage(format!("k-bit flip needs 1 <= k <= n, got k = {k}, n = {n}"));
        }
        Self::build(MutationKind::KBitFlip { k }, n)
    }

    pub fn heavy_tailed(tau: Rate, n: usize) -> Result<Self> {
        Self::build(MutationKind::HeavyTailed { tau }, n)
    }

    fn build(kind: MutationKind, n: usize) -> Result<Self> {
        if n == 0 {
            return usage("genome length must be positive");
        }
        let heavy_sampler = match kind {
            MutationKind::HeavyTailed { tau } => {
                let tau = tau.to_f64();
                let weights: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-tau)).collect();
                Some(WeightedIndex::new(weights).map_err(|e| Error::Usage(format!("heavy-tailed weights: {e}")))?)
            }
            _ => None,
        };
        Ok(MutationOp { kind, n, heavy_sampler })
    }

    /// Parses `sbm:p=<rate>`, `kflip:k=<int>` or `heavy:tau=<real>`.
    ///
    /// Rates accept decimals, fractions, and the shorthand `<a>/n` for `a/n`.
    pub fn parse(spec: &str, n: usize) -> Result<Self> {
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let value = |key: &str| -> Result<String> {
            args.split(',')
                .filter_map(|kv| kv.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim().replace("/n", &format!("/{n}")))
                .ok_or_else(|| Error::Parse(format!("mutation {spec:?} is missing `{key}=`")))
        };
        match name.trim() {
            "sbm" => Self::standard_bit(value("p")?.parse()?, n),
            "kflip" => {
                let k = value("k")?;
                let k = k.parse().map_err(|_| Error::Parse(format!("bad k in {spec:?}")))?;
                Self::k_bit_flip(k, n)
            }
            "heavy" => Self::heavy_tailed(value("tau")?.parse()?, n),
            other => Err(Error::Parse(format!("unknown mutation operator {other:?}"))),
        }
    }

    pub fn kind(&self) -> MutationKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Samples an offspring of `x`.
    pub fn mutate<R: Rng + ?Sized>(&self, x: &BitString, rng: &mut R) -> BitString {
        assert_eq!(x.len(), self.n, "mutation operator built for n = {}", self.n);
        let mut y = x.clone();
        match self.kind {
            MutationKind::StandardBit { rate } => {
                let p = rate.to_f64();
                if p > 0.0 {
                    for i in 0..self.n {
                        if rng.gen_bool(p) {
                            y.flip(i);
                        }
                    }
                }
            }
            MutationKind::KBitFlip { k } => flip_random_subset(&mut y, k, rng),
            MutationKind::HeavyTailed { .. } => {
                let sampler = self.heavy_sampler.as_ref().expect("heavy sampler is built with the op");
                let k = sampler.sample(rng) + 1;
                flip_random_subset(&mut y, k, rng);
            }
        }
        y
    }

    /// `chi`, the expected number of flipped bits.
    pub fn expected_flips(&self) -> f64 {
        match self.kind {
            MutationKind::StandardBit { rate } => self.n as f64 * rate.to_f64(),
            MutationKind::KBitFlip { k } => k as f64,
            MutationKind::HeavyTailed { tau } => {
                let tau = tau.to_f64();
                let (num, den) = (1..=self.n).fold((0.0, 0.0), |(num, den), k| {
                    let w = (k as f64).powf(-tau);
                    (num + k as f64 * w, den + w)
                });
                num / den
            }
        }
    }

    /// `chi` as an exact rational, when the flip-count law has rational weights.
    pub fn expected_flips_exact(&self) -> Result<BigRational> {
        let law = self.flip_count_law()?;
        Ok(law
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (k, p)| acc + big(k as i64) * p))
    }

    /// Exact law of the flip count: entry `k` is `P(K = k)` for `k` in `0..=n`.
    pub fn flip_count_law(&self) -> Result<Vec<BigRational>> {
        let n = self.n;
        let mut law = vec![BigRational::zero(); n + 1];
        match self.kind {
            MutationKind::StandardBit { rate } => {
                let p = rate.to_big();
                let q = BigRational::one() - &p;
                for (k, slot) in law.iter_mut().enumerate() {
                    *slot = BigRational::from_integer(binomial(n, k)) * pow(&p, k) * pow(&q, n - k);
                }
            }
            MutationKind::KBitFlip { k } => law[k] = BigRational::one(),
            MutationKind::HeavyTailed { tau } => {
                if !tau.is_integer() {
                    return capability(format!(
                        "heavy-tailed law with non-integer tau = {tau} has irrational weights"
                    ));
                }
                let t = *tau.inner().numer();
                let weight = |k: usize| {
                    let kk = BigInt::from(k);
                    let power = num_traits::pow(kk, t.unsigned_abs() as usize);
                    if t >= 0 {
                        BigRational::new(BigInt::one(), power)
                    } else {
                        BigRational::from_integer(power)
                    }
                };
                let total = (1..=n).fold(BigRational::zero(), |acc, k| acc + weight(k));
                for (k, slot) in law.iter_mut().enumerate().skip(1) {
                    *slot = weight(k) / &total;
                }
            }
        }
        Ok(law)
    }

    /// Exact output distribution for parent `x`, up to the default size limit.
    pub fn exact_distribution(&self, x: &BitString) -> Result<Distribution> {
        self.exact_distribution_with_limit(x, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn exact_distribution_with_limit(&self, x: &BitString, limit: usize) -> Result<Distribution> {
        if self.n > limit {
            return capability(format!("n = {} exceeds the enumeration limit {limit}", self.n));
        }
        if x.len() != self.n {
            return usage(format!("length mismatch: {} vs {}", x.len(), self.n));
        }
        let law = self.flip_count_law()?;
        let per_subset: Vec<BigRational> = law
            .iter()
            .enumerate()
            .map(|(k, p)| p / BigRational::from_integer(binomial(self.n, k)))
            .collect();
        let mut dist = Distribution::new();
        for y in BitString::all(self.n) {
            let k = x.distance_unchecked(&y);
            add_mass(&mut dist, y, per_subset[k].clone());
        }
        Ok(dist)
    }
}

fn flip_random_subset<R: Rng + ?Sized>(y: &mut BitString, k: usize, rng: &mut R) {
    for i in rand::seq::index::sample(rng, y.len(), k) {
        y.flip(i);
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl fmt::Display for MutationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            MutationKind::StandardBit { rate } => format!("sbm:p={rate}"),
            MutationKind::KBitFlip { k } => format!("kflip:k={k}"),
            MutationKind::HeavyTailed { tau } => format!("heavy:tau={tau}"),
        };
        f.pad(&name)
    }
}

impl Serialize for MutationOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

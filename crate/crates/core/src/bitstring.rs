//! Fixed-length binary genomes and the population container.
//!
//! Bits are packed into `u64` words. Position `0` is the leftmost character of
//! the textual form, so `"110"` has ones at positions 0 and 1.
//!
//! [`Population`] keeps the per-position one-counts `c_i` next to the members
//! so that the diversity `S(P) = 2 * sum_i c_i (mu - c_i)` (the ordered double sum
//! of pairwise Hamming distances) is maintained in `O(n)` per replacement.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{usage, Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString {
            len: n,
            words: vec![0; n.div_ceil(WORD)],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut x = Self::zeros(n);
        for w in x.words.iter_mut() {
            *w = u64::MAX;
        }
        x.mask_tail();
        x
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            x.set(i, b);
        }
        x
    }

    /// The string whose bits spell `index` in binary, position 0 most significant.
    ///
    /// Enumerating `0..2^n` therefore visits strings in lexicographic order.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 63, "from_index supports n <= 63");
        let mut x = Self::zeros(n);
        for i in 0..n {
            x.set(i, (index >> (n - 1 - i)) & 1 == 1);
        }
        x
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 63, "to_index supports n <= 63");
        (0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    /// All `2^n` strings of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        (0..1u64 << n).map(move |i| BitString::from_index(n, i))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Indices of the one-bits, ascending.
    pub fn one_positions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let tz = w.trailing_zeros() as usize;
                out.push(wi * WORD + tz);
                w &= w - 1;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn complement(&self) -> Self {
        let mut x = self.clone();
        for w in x.words.iter_mut() {
            *w = !*w;
        }
        x.mask_tail();
        x
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a ^ b)
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    /// Applies a position permutation: bit `i` of `self` moves to position `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.len);
        let mut y = Self::zeros(self.len);
        for (i, &target) in perm.iter().enumerate() {
            y.set(target, self.get(i));
        }
        y
    }

    /// Hamming distance; fails on a length mismatch.
    pub fn distance(&self, other: &Self) -> Result<usize> {
        check_len(self, other)?;
        Ok(self.distance_unchecked(other))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, other: &Self) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut x = Self::zeros(n);
        for w in x.words.iter_mut() {
            *w = rng.gen();
        }
        x.mask_tail();
        x
    }

    fn zip_words(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        check_len(self, other)?;
        let mut x = BitString {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect(),
        };
        x.mask_tail();
        Ok(x)
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for BitString {
    /// Shorter strings first, then lexicographic by position.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len.cmp(&other.len).then_with(|| {
            self.words
                .iter()
                .map(|w| w.reverse_bits())
                .cmp(other.words.iter().map(|w| w.reverse_bits()))
        })
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn check_len(x: &BitString, y: &BitString) -> Result<()> {
    if x.len != y.len {
        return usage(format!("length mismatch: {} vs {}", x.len, y.len));
    }
    Ok(())
}

/// Number of positions in which `x` and `y` differ.
pub fn hamming(x: &BitString, y: &BitString) -> Result<usize> {
    x.distance(y)
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bits(&bits))
    }
}

/// A multiset of `mu` equal-length genomes with incrementally maintained diversity.
#[derive(Clone, PartialEq, Eq)]
pub struct Population {
    members: Vec<BitString>,
    one_counts: Vec<u32>,
    diversity: u64,
}

impl Population {
    pub fn new(members: Vec<BitString>) -> Result<Self> {
        let Some(first) = members.first() else {
            return usage("population must have at least one member");
        };
        let n = first.len();
        if n == 0 {
            return usage("genome length must be positive");
        }
        if let Some(bad) = members.iter().find(|m| m.len() != n) {
            return usage(format!("member length {} differs from {}", bad.len(), n));
        }
        let mut one_counts = vec![0u32; n];
        for m in &members {
            for i in m.one_positions() {
                one_counts[i] += 1;
            }
        }
        let mu = members.len() as u64;
        let diversity = diversity_from_counts(&one_counts, mu);
        Ok(Population {
            members,
            one_counts,
            diversity,
        })
    }

    /// `mu` copies of the all-zeros string.
    pub fn monomorphic(mu: usize, n: usize) -> Result<Self> {
        Self::new(vec![BitString::zeros(n); mu])
    }

    /// `ceil(mu/2)` all-zeros strings followed by `floor(mu/2)` all-ones strings.
    pub fn max_diversity(mu: usize, n: usize) -> Result<Self> {
        let zeros = mu.div_ceil(2);
        let mut members = vec![BitString::zeros(n); zeros];
        members.extend(std::iter::repeat_n(BitString::ones(n), mu - zeros));
        Self::new(members)
    }

    pub fn uniform_random<R: Rng + ?Sized>(mu: usize, n: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..mu).map(|_| BitString::random(n, rng)).collect())
    }

    pub fn parse(members: &[&str]) -> Result<Self> {
        Self::new(members.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?)
    }

    #[inline]
    pub fn mu(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.one_counts.len()
    }

    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    pub fn get(&self, index: usize) -> Option<&BitString> {
        self.members.get(index)
    }

    pub fn one_counts(&self) -> &[u32] {
        &self.one_counts
    }

    /// `S(P)`, the ordered double sum of pairwise Hamming distances.
    #[inline]
    pub fn diversity(&self) -> u64 {
        self.diversity
    }

    /// `S_P(y) = sum_i H(x_i, y)`.
    pub fn point_diversity(&self, y: &BitString) -> Result<u64> {
        if y.len() != self.n() {
            return usage(format!("length mismatch: {} vs {}", y.len(), self.n()));
        }
        Ok(self.point_diversity_unchecked(y))
    }

    pub(crate) fn point_diversity_unchecked(&self, y: &BitString) -> u64 {
        self.members.iter().map(|x| x.distance_unchecked(y) as u64).sum()
    }

    /// Rebuilds `S(P)` by summing `H(x_i, x_j)` over all ordered pairs.
    pub fn recompute_diversity(&self) -> u64 {
        let mut total = 0u64;
        for (i, x) in self.members.iter().enumerate() {
            for y in &self.members[i + 1..] {
                total += x.distance_unchecked(y) as u64;
            }
        }
        2 * total
    }

    /// Replaces member `index` (0-based) by `y` in `O(n)`; returns the removed member.
    pub fn replace(&mut self, index: usize, y: BitString) -> Result<BitString> {
        if index >= self.mu() {
            return usage(format!("index {index} out of range for population of size {}", self.mu()));
        }
        if y.len() != self.n() {
            return usage(format!("length mismatch: {} vs {}", y.len(), self.n()));
        }
        let mu = self.mu() as u64;
        let old = std::mem::replace(&mut self.members[index], y);
        let new = &self.members[index];
        let mut diversity = self.diversity as i64;
        for (wi, (a, b)) in old.words().iter().zip(new.words()).enumerate() {
            let mut diff = a ^ b;
            while diff != 0 {
                let i = wi * WORD + diff.trailing_zeros() as usize;
                diff &= diff - 1;
                let c = self.one_counts[i] as u64;
                let c_new = if new.get(i) { c + 1 } else { c - 1 };
                diversity += 2 * (c_new * (mu - c_new)) as i64 - 2 * (c * (mu - c)) as i64;
                self.one_counts[i] = c_new as u32;
            }
        }
        self.diversity = diversity as u64;
        debug_assert_eq!(self.diversity, self.recompute_diversity());
        Ok(old)
    }

    /// Value-semantic form of [`Population::replace`].
    pub fn with_replaced(&self, index: usize, y: BitString) -> Result<Self> {
        let mut p = self.clone();
        p.replace(index, y)?;
        Ok(p)
    }

    /// Members sorted, the canonical form of the multiset.
    pub fn sorted_members(&self) -> Vec<BitString> {
        let mut m = self.members.clone();
        m.sort();
        m
    }
}

fn diversity_from_counts(counts: &[u32], mu: u64) -> u64 {
    counts
        .iter()
        .map(|&c| {
            let c = c as u64;
            2 * c * (mu - c)
        })
        .sum()
}

impl fmt::Debug for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Population")
            .field("members", &self.members.iter().map(|m| m.to_string()).collect::<Vec<_>>())
            .field("diversity", &self.diversity)
            .finish()
    }
}

//! Operator-property certification.
//!
//! Exact checks enumerate the operator's output distribution for every parent
//! pair. Operators without an exact distribution, and instances above the
//! size limit, fall back to seeded Monte Carlo; the verdict records which was
//! used. Work is split by parent pair and recombined in enumeration order, so
//! a run gives the same verdict and witness on any number of threads.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Limits, Mode, Property, Verdict, Witness};
use crate::bitstring::BitString;
use crate::crossover::CrossoverOp;
use crate::error::{capability, usage, Result};
use crate::mutation::MutationOp;
use crate::rational::{add_mass, big, Distribution};
use crate::stats::{bonferroni_z, within_tolerance, Moments, TestParams};

/// Monte Carlo settings for the statistical checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StatSettings {
    pub samples_per_case: u64,
    /// Cases (triples or pairs) are enumerated when there are at most this
    /// many, and sampled uniformly otherwise.
    pub max_cases: usize,
    pub seed: u64,
}

impl Default for StatSettings {
    fn default() -> Self {
        StatSettings {
            samples_per_case: 4000,
            max_cases: 4096,
            seed: 0x5eed,
        }
    }
}

/// Absolute tolerance added to the statistical diversity-neutral test, so
/// deterministic cases with zero sample variance are not failed by rounding.
const ABSOLUTE_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, Default)]
pub struct Certifier {
    pub limits: Limits,
    pub stats: StatSettings,
}

fn strings(n: usize) -> Vec<BitString> {
    BitString::all(n).collect()
}

fn pairs(n: usize) -> Vec<(BitString, BitString)> {
    let all = strings(n);
    let mut out = Vec::with_capacity(all.len() * all.len());
    for x1 in &all {
        for x2 in &all {
            out.push((x1.clone(), x2.clone()));
        }
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("successor exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

fn expected_distance(dist: &Distribution, z: &BitString) -> BigRational {
    dist.iter()
        .map(|(y, p)| p * big(y.distance_unchecked(z) as i64))
        .fold(BigRational::zero(), |a, x| a + x)
}

/// Positions where `x1` and `x2` agree but `y` differs from both.
fn disrespected(x1: &BitString, x2: &BitString, y: &BitString) -> bool {
    (0..x1.len()).any(|i| x1.get(i) == x2.get(i) && y.get(i) != x1.get(i))
}

/// Both sides of the characteristic equation,
/// `E[H(c(x1,x2),z) + H(c(x2,x1),z)]` and `H(x1,z) + H(x2,z)`.
pub fn characteristic_sides(
    op: &CrossoverOp,
    x1: &BitString,
    x2: &BitString,
    z: &BitString,
) -> Result<(BigRational, BigRational)> {
    let n = x1.len();
    if x2.len() != n || z.len() != n {
        return usage("characteristic equation needs three strings of one length");
    }
    let d12 = op.exact_distribution_with_limit(x1, x2, n)?;
    let d21 = op.exact_distribution_with_limit(x2, x1, n)?;
    let lhs = expected_distance(&d12, z) + expected_distance(&d21, z);
    let rhs = big((x1.distance_unchecked(z) + x2.distance_unchecked(z)) as i64);
    Ok((lhs, rhs))
}

/// Keeps the candidate with the larger discrepancy, the earlier one on ties.
fn better<T>(a: Option<(BigRational, T)>, b: Option<(BigRational, T)>) -> Option<(BigRational, T)> {
    match (a, b) {
        (Some(a), Some(b)) => {
            if b.0.cmp(&a.0) == Ordering::Greater {
                Some(b)
            } else {
                Some(a)
            }
        }
        (a, None) => a,
        (None, b) => b,
    }
}

fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

impl Certifier {
    pub fn new(limits: Limits, stats: StatSettings) -> Self {
        Certifier { limits, stats }
    }

    fn exact_possible(&self, op: &CrossoverOp, n: usize) -> bool {
        op.exact_enumerable() && self.limits.check_certify(n).is_ok()
    }

    fn require_exact(&self, op: &CrossoverOp, n: usize) -> Result<()> {
        if !op.exact_enumerable() {
            return capability(format!("{op} crossover has no exact distribution"));
        }
        self.limits.check_certify(n)
    }

    /// Checks the characteristic equation for every `(x1, x2, z)`.
    ///
    /// `Mode::Exact` falls back to the statistical test when the operator
    /// cannot be enumerated or `n` is above the limit.
    pub fn diversity_neutral(&self, op: &CrossoverOp, n: usize, mode: Mode) -> Result<Verdict> {
        if n == 0 {
            return usage("n must be positive");
        }
        if mode == Mode::Exact && self.exact_possible(op, n) {
            self.diversity_neutral_exact(op, n)
        } else {
            if mode == Mode::Exact {
                log::info!("{op} at n = {n}: falling back to statistical diversity-neutral test");
            }
            Ok(self.diversity_neutral_statistical(op, n))
        }
    }

    fn diversity_neutral_exact(&self, op: &CrossoverOp, n: usize) -> Result<Verdict> {
        let zs = strings(n);
        let per_pair: Vec<Option<(BigRational, Witness)>> = pairs(n)
            .into_par_iter()
            .map(|(x1, x2)| {
                let d12 = op.exact_distribution_with_limit(&x1, &x2, n)?;
                let d21 = op.exact_distribution_with_limit(&x2, &x1, n)?;
                let mut best = None;
                for z in &zs {
                    let lhs = expected_distance(&d12, z) + expected_distance(&d21, z);
                    let rhs = big((x1.distance_unchecked(z) + x2.distance_unchecked(z)) as i64);
                    if lhs != rhs {
                        let gap = (&lhs - &rhs).abs();
                        let mut w = Witness::pair(&x1, &x2, &lhs, &rhs);
                        w.z = Some(z.clone());
                        best = better(best, Some((gap, w)));
                    }
                }
                Ok(best)
            })
            .collect::<Result<_>>()?;
        let witness = per_pair.into_iter().fold(None, better).map(|(_, w)| w);
        Ok(Verdict::exact(Property::DiversityNeutral, witness))
    }

    fn diversity_neutral_statistical(&self, op: &CrossoverOp, n: usize) -> Verdict {
        let s = self.stats;
        let total = 1u128 << (3 * n).min(127);
        let enumerate = total <= s.max_cases as u128;
        let cases = if enumerate { total as usize } else { s.max_cases };
        let z_crit = bonferroni_z(cases);
        let results: Vec<Option<(f64, Witness)>> = (0..cases as u64)
            .into_par_iter()
            .map(|index| {
                let mut rng = case_rng(s.seed, index);
                let (x1, x2, z) = if enumerate {
                    let i = index;
                    let mask = (1u64 << n) - 1;
                    (
                        BitString::from_index(n, (i >> (2 * n)) & mask),
                        BitString::from_index(n, (i >> n) & mask),
                        BitString::from_index(n, i & mask),
                    )
                } else {
                    (BitString::random(n, &mut rng), BitString::random(n, &mut rng), BitString::random(n, &mut rng))
                };
                let rhs = (x1.distance_unchecked(&z) + x2.distance_unchecked(&z)) as f64;
                let m = sampled_lhs(op, &x1, &x2, &z, s.samples_per_case, &mut rng).expect("lengths match");
                let se = m.standard_error();
                if within_tolerance(m.mean(), rhs, se, z_crit, ABSOLUTE_FLOOR) {
                    None
                } else {
                    let mut w = Witness::pair(&x1, &x2, format!("{:.6}", m.mean()), rhs);
                    w.z = Some(z);
                    Some(((m.mean() - rhs).abs(), w))
                }
            })
            .collect();
        let witness = results
            .into_iter()
            .flatten()
            .fold(None::<(f64, Witness)>, |best, c| match best {
                Some(b) if b.0 >= c.0 => Some(b),
                _ => Some(c),
            })
            .map(|(_, w)| w);
        Verdict::statistical(
            Property::DiversityNeutral,
            witness,
            TestParams {
                samples_per_case: s.samples_per_case,
                cases,
                z_critical: z_crit,
                absolute_floor: ABSOLUTE_FLOOR,
                seed: s.seed,
            },
        )
    }

    /// Checks that offspring agree with the parents wherever the parents agree.
    pub fn respectful(&self, op: &CrossoverOp, n: usize, mode: Mode) -> Result<Verdict> {
        if n == 0 {
            return usage("n must be positive");
        }
        if mode == Mode::Exact && self.exact_possible(op, n) {
            let per_pair: Vec<Option<Witness>> = pairs(n)
                .into_par_iter()
                .map(|(x1, x2)| {
                    let dist = op.exact_distribution_with_limit(&x1, &x2, n)?;
                    Ok(dist.into_iter().find(|(y, _)| disrespected(&x1, &x2, y)).map(|(y, p)| {
                        let mut w = Witness::pair(&x1, &x2, format!("P(offspring) = {p}"), "0");
                        w.offspring = Some(y);
                        w
                    }))
                })
                .collect::<Result<_>>()?;
            Ok(Verdict::exact(Property::Respectful, per_pair.into_iter().flatten().next()))
        } else {
            Ok(self.respectful_statistical(op, n))
        }
    }

    fn respectful_statistical(&self, op: &CrossoverOp, n: usize) -> Verdict {
        let s = self.stats;
        let total = 1u128 << (2 * n).min(127);
        let enumerate = total <= s.max_cases as u128;
        let cases = if enumerate { total as usize } else { s.max_cases };
        let found: Vec<Option<Witness>> = (0..cases as u64)
            .into_par_iter()
            .map(|index| {
                let mut rng = case_rng(s.seed, index);
                let (x1, x2) = if enumerate {
                    let mask = (1u64 << n) - 1;
                    (BitString::from_index(n, index >> n), BitString::from_index(n, index & mask))
                } else {
                    (BitString::random(n, &mut rng), BitString::random(n, &mut rng))
                };
                (0..s.samples_per_case).find_map(|_| {
                    let y = op.crossover(&x1, &x2, &mut rng).expect("lengths match");
                    disrespected(&x1, &x2, &y).then(|| {
                        let mut w = Witness::pair(&x1, &x2, "sampled", "never");
                        w.offspring = Some(y);
                        w
                    })
                })
            })
            .collect();
        Verdict::statistical(
            Property::Respectful,
            found.into_iter().flatten().next(),
            TestParams {
                samples_per_case: s.samples_per_case,
                cases,
                z_critical: 0.0,
                absolute_floor: 0.0,
                seed: s.seed,
            },
        )
    }

    /// Checks that the mask distribution on differing positions is the same
    /// for both parent orders. The operator must be respectful.
    pub fn oim(&self, op: &CrossoverOp, n: usize) -> Result<Verdict> {
        self.require_exact(op, n)?;
        if !self.respectful(op, n, Mode::Exact)?.holds {
            return usage(format!("{op} is not respectful, so it has no mask representation"));
        }
        let per_pair: Vec<Option<Witness>> = pairs(n)
            .into_par_iter()
            .filter(|(x1, x2)| x1 < x2)
            .map(|(x1, x2)| {
                let diff: Vec<usize> = (0..n).filter(|&i| x1.get(i) != x2.get(i)).collect();
                let masks = |a: &BitString, b: &BitString| -> Result<Distribution> {
                    let mut out = Distribution::new();
                    for (y, p) in op.exact_distribution_with_limit(a, b, n)? {
                        let bits: Vec<bool> = diff.iter().map(|&i| y.get(i) == a.get(i)).collect();
                        add_mass(&mut out, BitString::from_bits(&bits), p);
                    }
                    Ok(out)
                };
                let forward = masks(&x1, &x2)?;
                let backward = masks(&x2, &x1)?;
                if forward == backward {
                    return Ok(None);
                }
                let (mask, _) = forward
                    .iter()
                    .find(|(m, p)| backward.get(*m) != Some(*p))
                    .or_else(|| backward.iter().find(|(m, _)| !forward.contains_key(*m)))
                    .expect("distributions differ somewhere");
                let show = |d: &Distribution| d.get(mask).map_or("0".to_string(), |p| p.to_string());
                let mut w = Witness::pair(&x1, &x2, show(&backward), show(&forward));
                w.offspring = Some(mask.clone());
                Ok(Some(w))
            })
            .collect::<Result<_>>()?;
        Ok(Verdict::exact(Property::Oim, per_pair.into_iter().flatten().next()))
    }

    /// Checks invariance of the output distribution under every position
    /// permutation combined with every XOR shift.
    pub fn unbiased(&self, op: &CrossoverOp, n: usize) -> Result<Verdict> {
        self.require_exact(op, n)?;
        let perms = permutations(n);
        let zs = strings(n);
        let per_pair: Vec<Option<Witness>> = pairs(n)
            .into_par_iter()
            .map(|(x1, x2)| {
                let base = op.exact_distribution_with_limit(&x1, &x2, n)?;
                for sigma in &perms {
                    for z in &zs {
                        let t = |x: &BitString| x.permute(sigma).xor(z).expect("lengths match");
                        let moved = op.exact_distribution_with_limit(&t(&x1), &t(&x2), n)?;
                        let mut mapped = Distribution::new();
                        for (y, p) in &base {
                            add_mass(&mut mapped, t(y), p.clone());
                        }
                        if mapped != moved {
                            let (y, p) = mapped
                                .iter()
                                .find(|(y, p)| moved.get(*y) != Some(*p))
                                .map(|(y, p)| (y.clone(), p.clone()))
                                .or_else(|| moved.iter().find(|(y, _)| !mapped.contains_key(*y)).map(|(y, _)| (y.clone(), BigRational::zero())))
                                .expect("distributions differ somewhere");
                            let measured = moved.get(&y).cloned().unwrap_or_else(BigRational::zero);
                            let mut w = Witness::pair(&x1, &x2, measured, p);
                            w.z = Some(z.clone());
                            w.offspring = Some(y);
                            w.permutation = Some(sigma.clone());
                            return Ok(Some(w));
                        }
                    }
                }
                Ok(None)
            })
            .collect::<Result<_>>()?;
        Ok(Verdict::exact(Property::Unbiased, per_pair.into_iter().flatten().next()))
    }

    /// The unary form of [`Certifier::unbiased`], for mutation operators.
    pub fn mutation_unbiased(&self, op: &MutationOp) -> Result<Verdict> {
        let n = op.n();
        self.limits.check_certify(n)?;
        let perms = permutations(n);
        let zs = strings(n);
        for x in strings(n) {
            let base = op.exact_distribution_with_limit(&x, n)?;
            for sigma in &perms {
                for z in &zs {
                    let t = |x: &BitString| x.permute(sigma).xor(z).expect("lengths match");
                    let moved = op.exact_distribution_with_limit(&t(&x), n)?;
                    let mut mapped = Distribution::new();
                    for (y, p) in &base {
                        add_mass(&mut mapped, t(y), p.clone());
                    }
                    if mapped != moved {
                        let mut w = Witness::pair(&x, &x, "distribution differs", "shifted distribution");
                        w.z = Some(z.clone());
                        w.permutation = Some(sigma.clone());
                        return Ok(Verdict::exact(Property::Unbiased, Some(w)));
                    }
                }
            }
        }
        Ok(Verdict::exact(Property::Unbiased, None))
    }

    /// Checks `E[H(z, mutate(x))] = chi + (1 - 2 chi / n) H(z, x)` for all `x, z`.
    ///
    /// Returns the first failing pair as `(x1 = x, x2 = z)`.
    pub fn mutation_distance_identity(&self, op: &MutationOp) -> Result<Option<Witness>> {
        let n = op.n();
        self.limits.check_certify(n)?;
        let chi = op.expected_flips_exact()?;
        let slope = big(1) - big(2) * &chi / big(n as i64);
        for x in strings(n) {
            let dist = op.exact_distribution_with_limit(&x, n)?;
            for z in strings(n) {
                let lhs = expected_distance(&dist, &z);
                let rhs = &chi + &slope * big(x.distance_unchecked(&z) as i64);
                if lhs != rhs {
                    return Ok(Some(Witness::pair(&x, &z, lhs, rhs)));
                }
            }
        }
        Ok(None)
    }
}

/// Mean of the characteristic-equation LHS over `samples` draws, for
/// operators without an exact distribution.
pub fn sampled_lhs<R: Rng + ?Sized>(
    op: &CrossoverOp,
    x1: &BitString,
    x2: &BitString,
    z: &BitString,
    samples: u64,
    rng: &mut R,
) -> Result<Moments> {
    let mut m = Moments::default();
    for _ in 0..samples {
        let a = op.crossover(x1, x2, rng)?;
        let b = op.crossover(x2, x1, rng)?;
        m.push((a.distance_unchecked(z) + b.distance_unchecked(z)) as f64);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rate;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn op(spec: &str) -> CrossoverOp {
        CrossoverOp::parse(spec).unwrap()
    }

    fn cert() -> Certifier {
        Certifier::default()
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(1), vec![vec![0]]);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn uniform_half_is_neutral() {
        let v = cert().diversity_neutral(&op("uniform:c=1/2"), 3, Mode::Exact).unwrap();
        assert!(v.holds && v.mode == Mode::Exact && v.witness.is_none());
    }

    #[test]
    fn and_fails_with_characteristic_witness() {
        let v = cert().diversity_neutral(&op("and"), 3, Mode::Exact).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        let (lhs, rhs) = characteristic_sides(&op("and"), &w.x1, &w.x2, w.z.as_ref().unwrap()).unwrap();
        assert_eq!(w.measured, lhs.to_string());
        assert_eq!(w.expected, rhs.to_string());
        assert_eq!((lhs - rhs).abs(), big(3));
        let (lhs, rhs) = characteristic_sides(&op("and"), &b("101"), &b("010"), &b("000")).unwrap();
        assert_eq!((lhs, rhs), (big(0), big(3)));
    }

    #[test]
    fn alternating_fails() {
        let (lhs, rhs) = characteristic_sides(&op("alternating"), &b("110"), &b("101"), &b("110")).unwrap();
        assert_eq!((lhs, rhs), (big(0), big(2)));
        assert!(!cert().diversity_neutral(&op("alternating"), 3, Mode::Exact).unwrap().holds);
    }

    #[test]
    fn respectfulness_examples() {
        assert!(cert().respectful(&op("and"), 2, Mode::Exact).unwrap().holds);
        assert!(cert().respectful(&op("boring"), 3, Mode::Exact).unwrap().holds);
        let v = cert().respectful(&op("counter"), 3, Mode::Exact).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(disrespected(&w.x1, &w.x2, w.offspring.as_ref().unwrap()));
    }

    #[test]
    fn oim_examples() {
        for c in [(0, 1), (1, 3), (1, 1)] {
            let u = CrossoverOp::uniform(Rate::new(c.0, c.1)).unwrap();
            assert!(cert().oim(&u, 3).unwrap().holds);
        }
        let v = cert().oim(&op("and"), 2).unwrap();
        assert!(!v.holds);
        // Any pair differing in one position already forces the mask to swap.
        let w = v.witness.unwrap();
        assert_eq!((w.x1.to_string(), w.x2.to_string()), ("00".into(), "01".into()));
        assert!(matches!(cert().oim(&op("counter"), 3), Err(crate::Error::Usage(_))));
        // Uniform with bias 1 always returns the first parent.
        assert!(cert().oim(&op("uniform:c=1"), 3).unwrap().holds);
    }

    #[test]
    fn unbiasedness_examples() {
        assert!(cert().unbiased(&op("uniform:c=1/2"), 3).unwrap().holds);
        assert!(cert().unbiased(&op("boring"), 3).unwrap().holds);
        let v = cert().unbiased(&op("and"), 1).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap().z, Some(b("1")));
        assert!(!cert().unbiased(&op("kpoint:k=1"), 3).unwrap().holds);
    }

    #[test]
    fn statistical_fallback_is_recorded() {
        let v = cert().diversity_neutral(&op("zerolen"), 3, Mode::Exact).unwrap();
        assert_eq!(v.mode, Mode::Statistical);
        assert!(v.confidence.is_some());
        assert!(!v.holds);
        let neutral = Certifier::new(Limits::default(), StatSettings { samples_per_case: 300, ..Default::default() })
            .diversity_neutral(&op("uniform:c=1/2"), 3, Mode::Statistical)
            .unwrap();
        assert!(neutral.holds, "{:?}", neutral.witness);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| cert().diversity_neutral(&op("or"), 3, Mode::Exact).unwrap());
        let parallel = cert().diversity_neutral(&op("or"), 3, Mode::Exact).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn mutation_operators() {
        for m in ["kflip:k=1", "kflip:k=2", "sbm:p=1/4", "heavy:tau=2"] {
            let m = MutationOp::parse(m, 3).unwrap();
            assert!(cert().mutation_unbiased(&m).unwrap().holds, "{m}");
            assert_eq!(cert().mutation_distance_identity(&m).unwrap(), None, "{m}");
        }
    }
}

//! Binary crossover operators.
//!
//! Each operator has a sampler and, where the internal randomness is easy to
//! enumerate, an exact output distribution for small `n`. The classification
//! claimed for each operator is carried as metadata so reports can compare
//! measured verdicts against it.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::bitstring::BitString;
use crate::error::{capability, usage, Error, Result};
use crate::rational::{add_mass, big, pow, Distribution, Rate, DEFAULT_ENUMERATION_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossoverKind {
    /// Each bit from the first parent with probability `bias`, else from the second.
    Uniform { bias: Rate },
    /// `k` distinct cuts among the `n - 1` gaps; segments alternate, first parent first.
    KPoint { k: usize },
    /// Returns one of the parents uniformly at random.
    Boring,
    Shrinking,
    BalancedUniform,
    Alternating,
    CounterBased,
    ZeroLength,
    MapOfOnes,
    BalancedTwoPoint,
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CrossoverOp {
    kind: CrossoverKind,
}

impl CrossoverOp {
    pub fn uniform(bias: Rate) -> Result<Self> {
        if !bias.in_unit_interval() {
            return usage(format!("crossover bias {bias} outside [0, 1]"));
        }
        Ok(Self::of(CrossoverKind::Uniform { bias }))
    }

    pub fn k_point(k: usize) -> Result<Self> {
        if k == 0 {
            return usage("k-point crossover needs k >= 1");
        }
        Ok(Self::of(CrossoverKind::KPoint { k }))
    }

    pub const fn of(kind: CrossoverKind) -> Self {
        CrossoverOp { kind }
    }

    pub fn boring() -> Self {
        Self::of(CrossoverKind::Boring)
    }

    /// Parses the operator spec strings used on the command line.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let value = |key: &str| {
            args.split(',')
                .filter_map(|kv| kv.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim().to_string())
        };
        let kind = match name.trim() {
            "uniform" => {
                let bias = match value("c") {
                    Some(c) => c.parse()?,
                    None => Rate::new(1, 2),
                };
                return Self::uniform(bias);
            }
            "kpoint" => {
                let k = value("k").ok_or_else(|| Error::Parse(format!("{spec:?} is missing `k=`")))?;
                let k = k.parse().map_err(|_| Error::Parse(format!("bad k in {spec:?}")))?;
                return Self::k_point(k);
            }
            "boring" => CrossoverKind::Boring,
            "shrinking" => CrossoverKind::Shrinking,
            "balanced-uniform" => CrossoverKind::BalancedUniform,
            "alternating" => CrossoverKind::Alternating,
            "counter" => CrossoverKind::CounterBased,
            "zerolen" => CrossoverKind::ZeroLength,
            "mapones" => CrossoverKind::MapOfOnes,
            "balanced-2pt" => CrossoverKind::BalancedTwoPoint,
            "and" => CrossoverKind::And,
            "or" => CrossoverKind::Or,
            other => return Err(Error::Parse(format!("unknown crossover operator {other:?}"))),
        };
        Ok(Self::of(kind))
    }

    pub fn kind(&self) -> CrossoverKind {
        self.kind
    }

    /// Human-readable operator family name.
    pub fn family(&self) -> &'static str {
        match self.kind {
            CrossoverKind::Uniform { .. } => "uniform",
            CrossoverKind::KPoint { .. } => "k-point",
            CrossoverKind::Boring => "boring",
            CrossoverKind::Shrinking => "shrinking",
            CrossoverKind::BalancedUniform => "balanced-uniform",
            CrossoverKind::Alternating => "alternating",
            CrossoverKind::CounterBased => "counter-based",
            CrossoverKind::ZeroLength => "zero-length",
            CrossoverKind::MapOfOnes => "map-of-ones",
            CrossoverKind::BalancedTwoPoint => "balanced-two-point",
            CrossoverKind::And => "bitwise-and",
            CrossoverKind::Or => "bitwise-or",
        }
    }

    /// Whether the operator is known to be diversity-neutral.
    pub fn claimed_diversity_neutral(&self) -> bool {
        matches!(
            self.kind,
            CrossoverKind::Uniform { .. }
                | CrossoverKind::KPoint { .. }
                | CrossoverKind::Boring
                | CrossoverKind::Shrinking
                | CrossoverKind::BalancedUniform
        )
    }

    /// Whether [`CrossoverOp::exact_distribution`] is supported.
    pub fn exact_enumerable(&self) -> bool {
        !matches!(
            self.kind,
            CrossoverKind::ZeroLength | CrossoverKind::MapOfOnes | CrossoverKind::BalancedTwoPoint
        )
    }

    /// Samples one offspring of `(x1, x2)`.
    pub fn crossover<R: Rng + ?Sized>(&self, x1: &BitString, x2: &BitString, rng: &mut R) -> Result<BitString> {
        if x1.len() != x2.len() {
            return usage(format!("parent length mismatch: {} vs {}", x1.len(), x2.len()));
        }
        let n = x1.len();
        let child = match self.kind {
            CrossoverKind::Uniform { bias } => {
                let c = bias.to_f64();
                let mut y = x2.clone();
                for i in 0..n {
                    if x1.get(i) != x2.get(i) && rng.gen_bool(c) {
                        y.set(i, x1.get(i));
                    }
                }
                y
            }
            CrossoverKind::KPoint { k } => {
                let gaps = n.saturating_sub(1);
                let mut cuts = rand::seq::index::sample(rng, gaps, k.min(gaps)).into_vec();
                cuts.sort_unstable();
                k_point_child(x1, x2, &cuts)
            }
            CrossoverKind::Boring => {
                if rng.gen_bool(0.5) {
                    x1.clone()
                } else {
                    x2.clone()
                }
            }
            CrossoverKind::Shrinking => shrinking_child(x1, x2),
            CrossoverKind::BalancedUniform => {
                let diff = differing_positions(x1, x2);
                let ones = rand::seq::index::sample(rng, diff.len(), diff.len() / 2).into_vec();
                balanced_child(x1, &diff, &ones)
            }
            CrossoverKind::Alternating => alternating_child(x1, x2),
            CrossoverKind::CounterBased => counter_based_child(x1, x2, |_| rng.gen_bool(0.5)),
            CrossoverKind::ZeroLength => zero_length_child(x1, x2, rng),
            CrossoverKind::MapOfOnes => map_of_ones_child(x1, x2, rng),
            CrossoverKind::BalancedTwoPoint => balanced_two_point_child(x1, x2, rng),
            CrossoverKind::And => x1.and(x2)?,
            CrossoverKind::Or => x1.or(x2)?,
        };
        debug_assert_eq!(child.len(), n);
        Ok(child)
    }

    /// Exact offspring distribution for `(x1, x2)`, up to the default size limit.
    pub fn exact_distribution(&self, x1: &BitString, x2: &BitString) -> Result<Distribution> {
        self.exact_distribution_with_limit(x1, x2, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn exact_distribution_with_limit(&self, x1: &BitString, x2: &BitString, limit: usize) -> Result<Distribution> {
        if !self.exact_enumerable() {
            return capability(format!("{} crossover has no exact distribution", self.family()));
        }
        if x1.len() != x2.len() {
            return usage(format!("parent length mismatch: {} vs {}", x1.len(), x2.len()));
        }
        let n = x1.len();
        if n > limit {
            return capability(format!("n = {n} exceeds the enumeration limit {limit}"));
        }
        let mut dist = Distribution::new();
        match self.kind {
            CrossoverKind::Uniform { bias } => {
                let diff = differing_positions(x1, x2);
                let c = bias.to_big();
                let q = BigRational::one() - &c;
                for mask in 0u64..1 << diff.len() {
                    let mut y = x2.clone();
                    let mut from_first = 0;
                    for (j, &i) in diff.iter().enumerate() {
                        if (mask >> j) & 1 == 1 {
                            y.set(i, x1.get(i));
                            from_first += 1;
                        }
                    }
                    let p = pow(&c, from_first) * pow(&q, diff.len() - from_first);
                    add_mass(&mut dist, y, p);
                }
            }
            CrossoverKind::KPoint { k } => {
                let gaps = n.saturating_sub(1);
                let subsets = combinations(gaps, k.min(gaps));
                let p = BigRational::new(One::one(), (subsets.len() as i64).into());
                for cuts in subsets {
                    add_mass(&mut dist, k_point_child(x1, x2, &cuts), p.clone());
                }
            }
            CrossoverKind::Boring => {
                let half = BigRational::new(1.into(), 2.into());
                add_mass(&mut dist, x1.clone(), half.clone());
                add_mass(&mut dist, x2.clone(), half);
            }
            CrossoverKind::Shrinking => add_mass(&mut dist, shrinking_child(x1, x2), BigRational::one()),
            CrossoverKind::BalancedUniform => {
                let diff = differing_positions(x1, x2);
                let subsets = combinations(diff.len(), diff.len() / 2);
                let p = BigRational::new(One::one(), (subsets.len() as i64).into());
                for ones in subsets {
                    add_mass(&mut dist, balanced_child(x1, &diff, &ones), p.clone());
                }
            }
            CrossoverKind::Alternating => add_mass(&mut dist, alternating_child(x1, x2), BigRational::one()),
            CrossoverKind::CounterBased => {
                // Each choice sequence over the n positions is equally likely; positions
                // after the stopping point never consume their choice.
                let weight = BigRational::new(One::one(), big(1i64 << n).to_integer());
                for choices in 0u64..1 << n {
                    let child = counter_based_child(x1, x2, |i| (choices >> i) & 1 == 1);
                    add_mass(&mut dist, child, weight.clone());
                }
            }
            CrossoverKind::And => add_mass(&mut dist, x1.and(x2)?, BigRational::one()),
            CrossoverKind::Or => add_mass(&mut dist, x1.or(x2)?, BigRational::one()),
            CrossoverKind::ZeroLength | CrossoverKind::MapOfOnes | CrossoverKind::BalancedTwoPoint => {
                unreachable!("checked by exact_enumerable")
            }
        }
        debug_assert_eq!(
            dist.values().fold(BigRational::zero(), |a, p| a + p),
            BigRational::one()
        );
        Ok(dist)
    }
}

/// All `k`-subsets of `0..n`, each sorted ascending.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn differing_positions(x1: &BitString, x2: &BitString) -> Vec<usize> {
    (0..x1.len()).filter(|&i| x1.get(i) != x2.get(i)).collect()
}

/// `cuts` are sorted gap indices; gap `g` sits between positions `g` and `g + 1`.
fn k_point_child(x1: &BitString, x2: &BitString, cuts: &[usize]) -> BitString {
    let mut y = x1.clone();
    let mut from_second = false;
    let mut next_cut = cuts.iter().peekable();
    for i in 0..x1.len() {
        if from_second {
            y.set(i, x2.get(i));
        }
        if next_cut.peek() == Some(&&i) {
            next_cut.next();
            from_second = !from_second;
        }
    }
    y
}

/// Window `[l, r)` shrinks alternately from the right and the left until both
/// parents have the same number of ones inside it; the window is then taken
/// from the second parent.
fn shrinking_child(x1: &BitString, x2: &BitString) -> BitString {
    let ones_in = |x: &BitString, l: usize, r: usize| (l..r).filter(|&i| x.get(i)).count();
    let (mut l, mut r) = (0, x1.len());
    let mut from_right = true;
    while ones_in(x1, l, r) != ones_in(x2, l, r) {
        if from_right {
            r -= 1;
        } else {
            l += 1;
        }
        from_right = !from_right;
    }
    let mut y = x1.clone();
    for i in l..r {
        y.set(i, x2.get(i));
    }
    y
}

/// Copies `x1`, then on `diff` sets exactly the entries indexed by `ones`.
fn balanced_child(x1: &BitString, diff: &[usize], ones: &[usize]) -> BitString {
    let mut y = x1.clone();
    for &i in diff {
        y.set(i, false);
    }
    for &j in ones {
        y.set(diff[j], true);
    }
    y
}

fn alternating_child(x1: &BitString, x2: &BitString) -> BitString {
    let a = x1.one_positions();
    let b = x2.one_positions();
    let keep = a.len().min(b.len());
    let mut merged = [a, b].concat();
    merged.sort_unstable();
    let mut y = BitString::zeros(x1.len());
    for &i in merged.iter().take(2 * keep).step_by(2) {
        y.set(i, true);
    }
    y
}

/// `pick_first(i)` decides whether position `i` is copied from `x1`.
fn counter_based_child(x1: &BitString, x2: &BitString, mut pick_first: impl FnMut(usize) -> bool) -> BitString {
    let n = x1.len();
    let target_ones = x1.count_ones();
    let target_zeros = n - target_ones;
    let mut y = BitString::zeros(n);
    let (mut ones, mut zeros) = (0, 0);
    for i in 0..n {
        if ones == target_ones {
            break;
        }
        if zeros == target_zeros {
            for j in i..n {
                y.set(j, true);
            }
            break;
        }
        let bit = if pick_first(i) { x1.get(i) } else { x2.get(i) };
        y.set(i, bit);
        if bit {
            ones += 1;
        } else {
            zeros += 1;
        }
    }
    y
}

fn zero_runs(x: &BitString) -> Vec<usize> {
    let mut runs = vec![0];
    for b in x.iter() {
        if b {
            runs.push(0);
        } else {
            *runs.last_mut().expect("runs is never empty") += 1;
        }
    }
    runs
}

fn zero_length_child<R: Rng + ?Sized>(x1: &BitString, x2: &BitString, rng: &mut R) -> BitString {
    let (a, b) = (zero_runs(x1), zero_runs(x2));
    let runs = a.len().min(b.len());
    let n = x1.len();
    let mut y = BitString::zeros(n);
    let mut pos = 0;
    for j in 0..runs {
        let (lo, hi) = (a[j].min(b[j]), a[j].max(b[j]));
        pos += rng.gen_range(lo..=hi);
        if j + 1 < runs {
            if pos >= n {
                break;
            }
            y.set(pos, true);
            pos += 1;
        }
    }
    y
}

fn map_of_ones_child<R: Rng + ?Sized>(x1: &BitString, x2: &BitString, rng: &mut R) -> BitString {
    let (m1, m2) = (x1.one_positions(), x2.one_positions());
    let slots = m1.len().min(m2.len());
    let mut y = BitString::zeros(x1.len());
    let mut pending = 0;
    for j in 0..slots {
        let i = if rng.gen_bool(0.5) { m1[j] } else { m2[j] };
        if y.get(i) {
            pending += 1;
        } else {
            y.set(i, true);
        }
    }
    for _ in 0..pending {
        let unused: Vec<usize> = m1.iter().copied().filter(|&i| !y.get(i)).collect();
        let i = unused[rng.gen_range(0..unused.len())];
        y.set(i, true);
    }
    y
}

fn balanced_two_point_child<R: Rng + ?Sized>(x1: &BitString, x2: &BitString, rng: &mut R) -> BitString {
    let (m1, m2) = (x1.one_positions(), x2.one_positions());
    let len = m1.len().min(m2.len());
    if len == 0 {
        return x1.clone();
    }
    let (a, b) = (rng.gen_range(0..len), rng.gen_range(0..len));
    let (u, v) = (a.min(b), a.max(b));
    let mut y = BitString::zeros(x1.len());
    for (j, &i) in m1.iter().enumerate() {
        if j < u || j > v {
            y.set(i, true);
        }
    }
    let mut duplicates = 0;
    for &i in &m2[u..=v] {
        if y.get(i) {
            duplicates += 1;
        } else {
            y.set(i, true);
        }
    }
    for &i in &m1[u..=v] {
        if duplicates == 0 {
            break;
        }
        if !y.get(i) {
            y.set(i, true);
            duplicates -= 1;
        }
    }
    y
}

impl fmt::Display for CrossoverOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            CrossoverKind::Uniform { bias } => format!("uniform:c={bias}"),
            CrossoverKind::KPoint { k } => format!("kpoint:k={k}"),
            CrossoverKind::Boring => "boring".into(),
            CrossoverKind::Shrinking => "shrinking".into(),
            CrossoverKind::BalancedUniform => "balanced-uniform".into(),
            CrossoverKind::Alternating => "alternating".into(),
            CrossoverKind::CounterBased => "counter".into(),
            CrossoverKind::ZeroLength => "zerolen".into(),
            CrossoverKind::MapOfOnes => "mapones".into(),
            CrossoverKind::BalancedTwoPoint => "balanced-2pt".into(),
            CrossoverKind::And => "and".into(),
            CrossoverKind::Or => "or".into(),
        };
        f.pad(&name)
    }
}

impl Serialize for CrossoverOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// One representative of every operator family, with the parameterisations
/// used by the classification report.
pub fn catalogue() -> Vec<CrossoverOp> {
    let mut ops: Vec<CrossoverOp> = [(0, 1), (1, 4), (1, 2), (1, 1)]
        .iter()
        .map(|&(p, q)| CrossoverOp::of(CrossoverKind::Uniform { bias: Rate::new(p, q) }))
        .collect();
    ops.extend([1, 2].map(|k| CrossoverOp::of(CrossoverKind::KPoint { k })));
    ops.extend(
        [
            CrossoverKind::Boring,
            CrossoverKind::Shrinking,
            CrossoverKind::BalancedUniform,
            CrossoverKind::Alternating,
            CrossoverKind::CounterBased,
            CrossoverKind::ZeroLength,
            CrossoverKind::MapOfOnes,
            CrossoverKind::BalancedTwoPoint,
            CrossoverKind::And,
            CrossoverKind::Or,
        ]
        .map(CrossoverOp::of),
    );
    ops
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::big_ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn alternating_example_is_order_free() {
        let op = CrossoverOp::of(CrossoverKind::Alternating);
        let mut r = rng();
        assert_eq!(op.crossover(&b("110"), &b("101"), &mut r).unwrap(), b("110"));
        assert_eq!(op.crossover(&b("101"), &b("110"), &mut r).unwrap(), b("110"));
    }

    #[test]
    fn and_of_complements_is_zero() {
        let op = CrossoverOp::of(CrossoverKind::And);
        let x = b("1011010");
        assert_eq!(op.crossover(&x, &x.complement(), &mut rng()).unwrap(), BitString::zeros(7));
        let or = CrossoverOp::of(CrossoverKind::Or);
        assert_eq!(or.crossover(&x, &x.complement(), &mut rng()).unwrap(), BitString::ones(7));
    }

    #[test]
    fn fully_biased_uniform_returns_first_parent() {
        let op = CrossoverOp::uniform(Rate::one()).unwrap();
        let mut r = rng();
        for _ in 0..10 {
            assert_eq!(op.crossover(&b("1100"), &b("0011"), &mut r).unwrap(), b("1100"));
        }
    }

    #[test]
    fn exact_distribution_examples() {
        let boring = CrossoverOp::boring();
        let d = boring.exact_distribution(&b("01"), &b("10")).unwrap();
        assert_eq!(d[&b("01")], big_ratio(1, 2));
        assert_eq!(d[&b("10")], big_ratio(1, 2));

        let uniform = CrossoverOp::uniform(Rate::new(1, 2)).unwrap();
        let d = uniform.exact_distribution(&b("00"), &b("11")).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.values().all(|p| *p == big_ratio(1, 4)));

        let balanced = CrossoverOp::of(CrossoverKind::BalancedUniform);
        let d = balanced.exact_distribution(&b("00"), &b("11")).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[&b("01")], big_ratio(1, 2));
        assert_eq!(d[&b("10")], big_ratio(1, 2));
    }

    #[test]
    fn boring_with_identical_parents_merges_mass() {
        let d = CrossoverOp::boring().exact_distribution(&b("101"), &b("101")).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&b("101")], BigRational::one());
    }

    #[test]
    fn non_enumerable_operators_report_capability() {
        for kind in [CrossoverKind::ZeroLength, CrossoverKind::MapOfOnes, CrossoverKind::BalancedTwoPoint] {
            let op = CrossoverOp::of(kind);
            assert!(matches!(op.exact_distribution(&b("01"), &b("10")), Err(Error::Capability(_))));
        }
    }

    #[test]
    fn length_mismatch_is_usage_error() {
        for op in catalogue() {
            assert!(matches!(op.crossover(&b("01"), &b("011"), &mut rng()), Err(Error::Usage(_))), "{op}");
        }
    }

    #[test]
    fn one_point_cuts() {
        // n = 3 has cuts after position 0 or 1.
        let op = CrossoverOp::k_point(1).unwrap();
        let d = op.exact_distribution(&b("111"), &b("000")).unwrap();
        assert_eq!(d[&b("100")], big_ratio(1, 2));
        assert_eq!(d[&b("110")], big_ratio(1, 2));
        // More cuts than gaps degrades to the available gaps.
        let op = CrossoverOp::k_point(5).unwrap();
        let d = op.exact_distribution(&b("111"), &b("000")).unwrap();
        assert_eq!(d[&b("101")], BigRational::one());
    }

    #[test]
    fn shrinking_window() {
        // Counts already equal on the full window: whole second parent.
        assert_eq!(shrinking_child(&b("1100"), &b("0011")), b("0011"));
        // 110 vs 001: [0,3) 2 vs 1, [0,2) 2 vs 0, [1,2) 1 vs 0, [1,1) empty.
        assert_eq!(shrinking_child(&b("110"), &b("001")), b("110"));
        // 101 vs 011 -> counts equal at once.
        assert_eq!(shrinking_child(&b("101"), &b("011")), b("011"));
        // 1000 vs 0110: [0,4) 1 vs 2, [0,3) 1 vs 2, [1,3) 0 vs 2, [1,2) 0 vs 1, [2,2).
        assert_eq!(shrinking_child(&b("1000"), &b("0110")), b("1000"));
        // 1010 vs 0100: [0,4) 2 vs 1, [0,3) 2 vs 1, [1,3) 1 vs 1 -> window positions 1..3.
        assert_eq!(shrinking_child(&b("1010"), &b("0100")), b("1100"));
    }

    #[test]
    fn counter_based_keeps_first_parent_weight() {
        let op = CrossoverOp::of(CrossoverKind::CounterBased);
        let d = op.exact_distribution(&b("10"), &b("00")).unwrap();
        // Choosing x2 at position 0 puts a zero first, exhausting the zero budget.
        assert_eq!(d[&b("10")], big_ratio(1, 2));
        assert_eq!(d[&b("01")], big_ratio(1, 2));
    }

    #[test]
    fn zero_runs_encoding() {
        assert_eq!(zero_runs(&b("0010100")), vec![2, 1, 2]);
        assert_eq!(zero_runs(&b("000")), vec![3]);
        assert_eq!(zero_runs(&b("11")), vec![0, 0, 0]);
    }

    #[test]
    fn map_based_operators_keep_length_and_weight() {
        let mut r = rng();
        let x1 = b("1100110010");
        let x2 = b("0111000011");
        for _ in 0..500 {
            let y = CrossoverOp::of(CrossoverKind::BalancedTwoPoint).crossover(&x1, &x2, &mut r).unwrap();
            assert_eq!(y.count_ones(), x1.count_ones());
            let y = CrossoverOp::of(CrossoverKind::MapOfOnes).crossover(&x1, &x2, &mut r).unwrap();
            assert_eq!(y.count_ones(), 5);
            let y = CrossoverOp::of(CrossoverKind::ZeroLength).crossover(&x1, &x2, &mut r).unwrap();
            assert_eq!(y.len(), 10);
        }
    }

    #[test]
    fn parse_round_trips_catalogue() {
        for op in catalogue() {
            assert_eq!(CrossoverOp::parse(&op.to_string()).unwrap(), op);
        }
        assert_eq!(CrossoverOp::parse("uniform").unwrap().to_string(), "uniform:c=1/2");
        assert!(CrossoverOp::parse("uniform:c=1.5").is_err());
        assert!(CrossoverOp::parse("kpoint:k=0").is_err());
        assert!(CrossoverOp::parse("kpoint").is_err());
        assert!(CrossoverOp::parse("pmx").is_err());
    }

    #[test]
    fn claimed_neutral_set() {
        let neutral: Vec<&str> = catalogue()
            .iter()
            .filter(|op| op.claimed_diversity_neutral())
            .map(|op| op.family())
            .collect();
        assert_eq!(
            neutral,
            ["uniform", "uniform", "uniform", "uniform", "k-point", "k-point", "boring", "shrinking", "balanced-uniform"]
        );
    }

    #[test]
    fn combinations_enumerate_subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}

//! One generation by total enumeration.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{pairwise_diversity, Limits};
use crate::bitstring::{BitString, Population};
use crate::crossover::CrossoverOp;
use crate::engine::{EngineConfig, ParentSampling, TieBreaking};
use crate::error::{capability, usage, Result};
use crate::rational::{add_mass, big, Distribution};
use crate::theory;

type Outcomes = Vec<(BitString, BigRational)>;

/// Exact one-step distributions for a fixed configuration.
///
/// Per-parent and per-pair offspring distributions are cached, so reusing one
/// enumerator across many populations of the same configuration is cheap.
pub struct DriftEnumerator {
    config: EngineConfig,
    mutated: HashMap<BitString, Outcomes>,
    children: HashMap<(BitString, BitString), Outcomes>,
}

impl DriftEnumerator {
    pub fn new(config: &EngineConfig) -> Result<Self> {
        Self::with_limits(config, &Limits::default())
    }

    pub fn with_limits(config: &EngineConfig, limits: &Limits) -> Result<Self> {
        config.validate()?;
        limits.check_drift(config.mu, config.n)?;
        config.mutation.flip_count_law()?;
        if let Some(op) = config.crossover {
            if !op.exact_enumerable() {
                return capability(format!("{op} crossover is not exactly enumerable"));
            }
        }
        Ok(DriftEnumerator {
            config: config.clone(),
            mutated: HashMap::new(),
            children: HashMap::new(),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    fn mutation_outcomes(&mut self, y: &BitString) -> Result<Outcomes> {
        if let Some(out) = self.mutated.get(y) {
            return Ok(out.clone());
        }
        let out: Outcomes = self
            .config
            .mutation
            .exact_distribution_with_limit(y, self.config.n)?
            .into_iter()
            .collect();
        self.mutated.insert(y.clone(), out.clone());
        Ok(out)
    }

    /// Distribution of the mutated offspring of the ordered pair `(x1, x2)`.
    fn pair_outcomes(&mut self, op: CrossoverOp, x1: &BitString, x2: &BitString) -> Result<Outcomes> {
        let key = (x1.clone(), x2.clone());
        if let Some(out) = self.children.get(&key) {
            return Ok(out.clone());
        }
        let n = self.config.n;
        let p_c = self.config.crossover_prob.to_big();
        let mut recombined = Distribution::new();
        if !p_c.is_zero() {
            for (y, p) in op.exact_distribution_with_limit(x1, x2, n)? {
                add_mass(&mut recombined, y, &p_c * p);
            }
        }
        let p_boring = BigRational::one() - &p_c;
        if !p_boring.is_zero() {
            for (y, p) in CrossoverOp::boring().exact_distribution_with_limit(x1, x2, n)? {
                add_mass(&mut recombined, y, &p_boring * p);
            }
        }
        let mut out = Distribution::new();
        for (y, p) in recombined {
            for (y2, q) in self.mutation_outcomes(&y)? {
                add_mass(&mut out, y2, &p * q);
            }
        }
        let out: Outcomes = out.into_iter().collect();
        self.children.insert(key, out.clone());
        Ok(out)
    }

    fn check_population(&self, pop: &Population) -> Result<()> {
        if pop.mu() != self.config.mu || pop.n() != self.config.n {
            return usage(format!(
                "population is {}x{}, configuration expects {}x{}",
                pop.mu(),
                pop.n(),
                self.config.mu,
                self.config.n
            ));
        }
        Ok(())
    }

    /// Exact distribution of the offspring, before removal.
    pub fn offspring_distribution(&mut self, pop: &Population) -> Result<Distribution> {
        self.check_population(pop)?;
        let mu = pop.mu();
        let members = pop.members();
        let mut dist = Distribution::new();
        match self.config.crossover {
            None => {
                let w = BigRational::new(1.into(), (mu as i64).into());
                for x in members {
                    for (y, p) in self.mutation_outcomes(x)? {
                        add_mass(&mut dist, y, &w * p);
                    }
                }
            }
            Some(op) => {
                let without = self.config.parent_sampling == ParentSampling::WithoutReplacement;
                let pairs = if without { mu * (mu - 1) } else { mu * mu };
                let w = BigRational::new(1.into(), (pairs as i64).into());
                for (i, x1) in members.iter().enumerate() {
                    for (j, x2) in members.iter().enumerate() {
                        if without && i == j {
                            continue;
                        }
                        for (y, p) in self.pair_outcomes(op, x1, x2)? {
                            add_mass(&mut dist, y, &w * p);
                        }
                    }
                }
            }
        }
        Ok(dist)
    }

    /// Each possible next population as sorted members, with its probability.
    pub fn next_population_distribution(&mut self, pop: &Population) -> Result<BTreeMap<Vec<BitString>, BigRational>> {
        let offspring = self.offspring_distribution(pop)?;
        let mu = pop.mu();
        let pool = match self.config.tie_breaking {
            TieBreaking::PreferOffspring => mu,
            TieBreaking::UniformRandom => mu + 1,
        };
        let w = BigRational::new(1.into(), (pool as i64).into());
        let mut out = BTreeMap::new();
        for (y, p) in offspring {
            let q = &p * &w;
            for d in 0..pool {
                let mut members = pop.members().to_vec();
                if d < mu {
                    members[d] = y.clone();
                }
                members.sort();
                *out.entry(members).or_insert_with(BigRational::zero) += &q;
            }
        }
        Ok(out)
    }

    /// `E[S(P_{t+1}) | P_t = pop]`.
    pub fn one_step_drift(&mut self, pop: &Population) -> Result<BigRational> {
        let offspring = self.offspring_distribution(pop)?;
        let mu = pop.mu();
        let keep_all = matches!(self.config.tie_breaking, TieBreaking::UniformRandom);
        let pool = if keep_all { mu + 1 } else { mu };
        let current = pairwise_diversity(pop.members());
        let mut total = BigRational::zero();
        for (y, p) in offspring {
            let mut sum = if keep_all { current } else { 0 };
            let mut members = pop.members().to_vec();
            for d in 0..mu {
                let removed = std::mem::replace(&mut members[d], y.clone());
                sum += pairwise_diversity(&members);
                members[d] = removed;
            }
            total += p * big(sum as i64);
        }
        Ok(total / big(pool as i64))
    }
}

/// `E[S(P_{t+1}) | P_t = pop]` for `config`, by total enumeration.
pub fn exact_one_step_drift(config: &EngineConfig, pop: &Population) -> Result<BigRational> {
    DriftEnumerator::new(config)?.one_step_drift(pop)
}

/// Every population of `mu` strings of length `n`, as multisets, in lexicographic order.
pub fn enumerate_populations(mu: usize, n: usize) -> Result<Vec<Population>> {
    if mu == 0 || n == 0 || n > 16 {
        return usage(format!("cannot enumerate populations with mu = {mu}, n = {n}"));
    }
    let points = 1u64 << n;
    let mut out = Vec::new();
    let mut idx = vec![0u64; mu];
    loop {
        let members = idx.iter().map(|&i| BitString::from_index(n, i)).collect();
        out.push(Population::new(members)?);
        // Next non-decreasing index vector.
        let mut k = mu;
        while k > 0 && idx[k - 1] == points - 1 {
            k -= 1;
        }
        if k == 0 {
            return Ok(out);
        }
        idx[k - 1] += 1;
        let v = idx[k - 1];
        for slot in &mut idx[k..] {
            *slot = v;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftMismatch {
    pub members: Vec<String>,
    pub diversity: u64,
    pub exact: String,
    pub predicted: String,
}

/// Enumerated drift against the closed form over every population of a configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaCheck {
    pub config: String,
    pub mu: usize,
    pub n: usize,
    pub chi: String,
    pub populations: usize,
    pub mismatches: Vec<DriftMismatch>,
}

impl FormulaCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl FormulaCheck {
    /// Runs the comparison for `config.mu` and `config.n`.
    pub fn run(config: &EngineConfig) -> Result<Self> {
        Self::run_with_limits(config, &Limits::default())
    }

    pub fn run_with_limits(config: &EngineConfig, limits: &Limits) -> Result<Self> {
        let mut enumerator = DriftEnumerator::with_limits(config, limits)?;
        let chi = config.mutation.expected_flips_exact()?;
        let pops = enumerate_populations(config.mu, config.n)?;
        let mut mismatches = Vec::new();
        for pop in &pops {
            let exact = enumerator.one_step_drift(pop)?;
            let s = pop.diversity();
            let predicted = theory::exact::predicted_drift(config.mu, config.n, &chi, config.tie_breaking, s);
            if exact != predicted {
                mismatches.push(DriftMismatch {
                    members: pop.members().iter().map(|m| m.to_string()).collect(),
                    diversity: s,
                    exact: exact.to_string(),
                    predicted: predicted.to_string(),
                });
            }
        }
        Ok(FormulaCheck {
            config: config.fingerprint(),
            mu: config.mu,
            n: config.n,
            chi: chi.to_string(),
            populations: pops.len(),
            mismatches,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::MutationOp;
    use crate::rational::{total_mass, Rate};

    fn kflip(k: usize, n: usize) -> MutationOp {
        MutationOp::k_bit_flip(k, n).unwrap()
    }

    #[test]
    fn two_opposite_strings() {
        let config = EngineConfig::ea(2, 2, kflip(1, 2));
        let pop = Population::parse(&["00", "11"]).unwrap();
        assert_eq!(exact_one_step_drift(&config, &pop).unwrap(), big(2));
    }

    #[test]
    fn monomorphic_start_gives_alpha() {
        let config = EngineConfig::ga(3, 3, kflip(2, 3), CrossoverOp::uniform(Rate::new(1, 2)).unwrap(), Rate::one());
        let pop = Population::monomorphic(3, 3).unwrap();
        // alpha = 2 (mu - 1) chi = 8
        assert_eq!(exact_one_step_drift(&config, &pop).unwrap(), big(8));
    }

    #[test]
    fn population_count_is_multiset_count() {
        // C(2^n + mu - 1, mu)
        assert_eq!(enumerate_populations(2, 2).unwrap().len(), 10);
        assert_eq!(enumerate_populations(3, 4).unwrap().len(), 816);
        let pops = enumerate_populations(3, 2).unwrap();
        assert!(pops.windows(2).all(|w| w[0].members() < w[1].members()));
    }

    #[test]
    fn distributions_are_normalised() {
        let config = EngineConfig::ga(3, 3, kflip(1, 3), CrossoverOp::k_point(1).unwrap(), Rate::new(1, 2))
            .with_tie_breaking(TieBreaking::UniformRandom);
        let pop = Population::parse(&["001", "110", "011"]).unwrap();
        let mut e = DriftEnumerator::new(&config).unwrap();
        assert_eq!(total_mass(&e.offspring_distribution(&pop).unwrap()), big(1));
        let next = e.next_population_distribution(&pop).unwrap();
        assert_eq!(next.values().fold(BigRational::zero(), |a, p| a + p), big(1));
        let mean: BigRational = next
            .iter()
            .map(|(m, p)| p * big(pairwise_diversity(m) as i64))
            .fold(BigRational::zero(), |a, x| a + x);
        assert_eq!(mean, e.one_step_drift(&pop).unwrap());
    }

    #[test]
    fn formula_holds_for_ea_small_grid() {
        for n in 1..=3 {
            let check = FormulaCheck::run(&EngineConfig::ea(2, n, kflip(1, n))).unwrap();
            assert!(check.passed(), "{:?}", check.mismatches.first());
        }
    }

    #[test]
    fn non_neutral_crossover_breaks_the_formula() {
        let config = EngineConfig::ga(3, 3, kflip(1, 3), CrossoverOp::parse("and").unwrap(), Rate::one());
        let check = FormulaCheck::run(&config).unwrap();
        assert!(!check.passed());
        assert!(check.mismatches.len() < check.populations);
    }

    #[test]
    fn rejects_out_of_range_and_unenumerable() {
        assert!(DriftEnumerator::new(&EngineConfig::ea(4, 3, kflip(1, 3))).is_err());
        let config = EngineConfig::ga(2, 3, kflip(1, 3), CrossoverOp::parse("zerolen").unwrap(), Rate::one());
        assert!(matches!(DriftEnumerator::new(&config), Err(crate::Error::Capability(_))));
    }
}

//! Steady-state (mu+1) EA and GA on a flat fitness function.
//!
//! With flat fitness the acceptance test always passes, so a generation is:
//! pick parent(s) uniformly, optionally recombine, mutate, and replace a
//! uniformly chosen member. Under uniform tie-breaking the offspring joins a
//! pool of `mu + 1` and a uniform member of the pool is discarded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitstring::{BitString, Population};
use crate::crossover::CrossoverOp;
use crate::error::{usage, Result};
use crate::mutation::MutationOp;
use crate::rational::Rate;
use crate::trajectory::TrajectoryRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreaking {
    /// The offspring always survives.
    #[default]
    PreferOffspring,
    /// A uniform member of the `mu + 1` pool (offspring included) is discarded.
    UniformRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ParentSampling {
    #[default]
    WithReplacement,
    WithoutReplacement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    #[default]
    MonomorphicZero,
    /// `ceil(mu/2)` all-zeros and `floor(mu/2)` all-ones members.
    MaxDiversity,
    UniformRandom,
    Explicit(#[serde(serialize_with = "serialize_members")] Vec<BitString>),
}

fn serialize_members<S: serde::Serializer>(members: &[BitString], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(members.iter().map(|m| m.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineConfig {
    pub mu: usize,
    pub n: usize,
    pub mutation: MutationOp,
    /// `None` runs the mutation-only EA.
    pub crossover: Option<CrossoverOp>,
    /// Probability of applying `crossover`; boring crossover is used otherwise.
    pub crossover_prob: Rate,
    pub parent_sampling: ParentSampling,
    pub tie_breaking: TieBreaking,
    pub init: Init,
    pub seed: u64,
}

impl EngineConfig {
    /// Mutation-only EA with the default policies.
    pub fn ea(mu: usize, n: usize, mutation: MutationOp) -> Self {
        EngineConfig {
            mu,
            n,
            mutation,
            crossover: None,
            crossover_prob: Rate::one(),
            parent_sampling: ParentSampling::WithReplacement,
            tie_breaking: TieBreaking::PreferOffspring,
            init: Init::MonomorphicZero,
            seed: 0,
        }
    }

    /// GA applying `crossover` with probability `crossover_prob`.
    pub fn ga(mu: usize, n: usize, mutation: MutationOp, crossover: CrossoverOp, crossover_prob: Rate) -> Self {
        EngineConfig {
            crossover: Some(crossover),
            crossover_prob,
            ..Self::ea(mu, n, mutation)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_tie_breaking(mut self, tie: TieBreaking) -> Self {
        self.tie_breaking = tie;
        self
    }

    pub fn with_parent_sampling(mut self, sampling: ParentSampling) -> Self {
        self.parent_sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu < 2 {
            return usage(format!("population size must be at least 2, got {}", self.mu));
        }
        if self.n == 0 {
            return usage("genome length must be positive");
        }
        if self.mutation.n() != self.n {
            return usage(format!("mutation built for n = {}, config has n = {}", self.mutation.n(), self.n));
        }
        if !self.crossover_prob.in_unit_interval() {
            return usage(format!("crossover probability {} outside [0, 1]", self.crossover_prob));
        }
        if let Init::Explicit(members) = &self.init {
            if members.len() != self.mu || members.iter().any(|m| m.len() != self.n) {
                return usage(format!("explicit population must hold {} strings of length {}", self.mu, self.n));
            }
        }
        Ok(())
    }

    /// Canonical JSON of the configuration, written into every output file.
    pub fn fingerprint(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    pub fn initial_population(&self) -> Result<Population> {
        self.validate()?;
        match &self.init {
            Init::MonomorphicZero => Population::monomorphic(self.mu, self.n),
            Init::MaxDiversity => Population::max_diversity(self.mu, self.n),
            Init::UniformRandom => {
                // Independent of the stream used by the steps.
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(u64::MAX);
                Population::uniform_random(self.mu, self.n, &mut rng)
            }
            Init::Explicit(members) => Population::new(members.clone()),
        }
    }

    /// The generator driving a run, derived from the seed.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// `2 (mu - 1) n`, the largest possible one-step change of `S`.
    pub fn max_step_change(&self) -> u64 {
        2 * (self.mu as u64 - 1) * self.n as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub offspring: BitString,
    /// Index of the discarded member; `mu` when the offspring itself was discarded.
    pub removed_index: usize,
    pub accepted: bool,
    pub diversity_after: u64,
}

/// Performs one generation in place.
///
/// Panics if the diversity moves by more than `2 (mu - 1) n`, which no correct
/// replacement can do.
pub fn step<R: Rng + ?Sized>(config: &EngineConfig, pop: &mut Population, rng: &mut R) -> StepOutcome {
    let mu = pop.mu();
    debug_assert_eq!(mu, config.mu);
    let before = pop.diversity();

    let parent = match config.crossover {
        None => pop.members()[rng.gen_range(0..mu)].clone(),
        Some(op) => {
            let i = rng.gen_range(0..mu);
            let j = match config.parent_sampling {
                ParentSampling::WithReplacement => rng.gen_range(0..mu),
                ParentSampling::WithoutReplacement => {
                    let j = rng.gen_range(0..mu - 1);
                    if j >= i {
                        j + 1
                    } else {
                        j
                    }
                }
            };
            let (x1, x2) = (&pop.members()[i], &pop.members()[j]);
            let p_c = config.crossover_prob.to_f64();
            let chosen = if p_c >= 1.0 || rng.gen_bool(p_c) { op } else { CrossoverOp::boring() };
            chosen.crossover(x1, x2, rng).expect("population members share one length")
        }
    };
    let offspring = config.mutation.mutate(&parent, rng);

    let removed_index = match config.tie_breaking {
        TieBreaking::PreferOffspring => rng.gen_range(0..mu),
        TieBreaking::UniformRandom => rng.gen_range(0..=mu),
    };
    let accepted = removed_index < mu;
    if accepted {
        pop.replace(removed_index, offspring.clone()).expect("index and length checked");
    }
    let after = pop.diversity();
    assert!(
        after.abs_diff(before) <= config.max_step_change(),
        "diversity moved from {before} to {after}, beyond 2(mu-1)n = {}",
        config.max_step_change()
    );
    StepOutcome {
        offspring,
        removed_index,
        accepted,
        diversity_after: after,
    }
}

/// Runs `steps` generations from the configured initial population, recording
/// `(t, S(P_t))` every `stride` steps (and always at `t = 0` and `t = steps`).
pub fn run(config: &EngineConfig, steps: u64, stride: u64) -> Result<TrajectoryRecord> {
    if stride == 0 {
        return usage("sampling stride must be positive");
    }
    let mut pop = config.initial_population()?;
    let mut rng = config.rng();
    let mut record = TrajectoryRecord::new(config.fingerprint(), config.mu, config.n);
    record.push(0, pop.diversity());
    for t in 1..=steps {
        step(config, &mut pop, &mut rng);
        if t % stride == 0 || t == steps {
            record.push(t, pop.diversity());
        }
    }
    Ok(record)
}

/// Runs from `pop` until `stop(S)` holds or `cap` steps have elapsed.
///
/// Returns the stopping time and the diversity at that time, or `None` when capped.
pub fn run_until<R: Rng + ?Sized>(
    config: &EngineConfig,
    pop: &mut Population,
    rng: &mut R,
    cap: u64,
    mut stop: impl FnMut(u64) -> bool,
) -> Option<(u64, u64)> {
    if stop(pop.diversity()) {
        return Some((0, pop.diversity()));
    }
    for t in 1..=cap {
        let out = step(config, pop, rng);
        if stop(out.diversity_after) {
            return Some((t, out.diversity_after));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossover::CrossoverKind;

    fn kflip(k: usize, n: usize) -> MutationOp {
        MutationOp::k_bit_flip(k, n).unwrap()
    }

    #[test]
    fn two_clones_one_bit_flip_gives_two() {
        let n = 9;
        let config = EngineConfig::ea(2, n, kflip(1, n));
        let mut rng = config.rng();
        for _ in 0..50 {
            let mut pop = Population::monomorphic(2, n).unwrap();
            let out = step(&config, &mut pop, &mut rng);
            assert_eq!(out.diversity_after, 2);
            assert!(out.accepted);
        }
    }

    #[test]
    fn prefer_offspring_always_accepts() {
        let n = 16;
        let config = EngineConfig::ga(4, n, kflip(2, n), CrossoverOp::uniform(Rate::new(1, 2)).unwrap(), Rate::one());
        let mut rng = config.rng();
        let mut pop = Population::max_diversity(4, n).unwrap();
        for _ in 0..500 {
            assert!(step(&config, &mut pop, &mut rng).accepted);
        }
    }

    #[test]
    fn uniform_tie_breaking_idles_at_rate_one_over_mu_plus_one() {
        let n = 8;
        let config = EngineConfig::ea(3, n, kflip(1, n)).with_tie_breaking(TieBreaking::UniformRandom);
        let mut rng = config.rng();
        let mut pop = Population::monomorphic(3, n).unwrap();
        let trials = 40_000;
        let idle = (0..trials).filter(|_| !step(&config, &mut pop, &mut rng).accepted).count();
        let rate = idle as f64 / trials as f64;
        let se = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!((rate - 0.25).abs() < 4.0 * se, "idle rate {rate}");
    }

    #[test]
    fn zero_steps_records_initial_diversity_only() {
        let n = 8;
        let config = EngineConfig::ea(2, n, kflip(1, n)).with_seed(1);
        let rec = run(&config, 0, 1).unwrap();
        assert_eq!(rec.samples(), &[(0, 0)]);
    }

    #[test]
    fn max_diversity_start() {
        for mu in 2..7 {
            let n = 5;
            let config = EngineConfig::ea(mu, n, kflip(1, n)).with_init(Init::MaxDiversity);
            let s0 = config.initial_population().unwrap().diversity();
            let (z, o) = (mu.div_ceil(2) as u64, (mu / 2) as u64);
            assert_eq!(s0, 2 * z * o * n as u64);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let n = 20;
        let config = EngineConfig::ga(5, n, kflip(1, n), CrossoverOp::of(CrossoverKind::Shrinking), Rate::new(1, 2))
            .with_seed(99)
            .with_init(Init::UniformRandom);
        let a = run(&config, 2000, 7).unwrap();
        let b = run(&config, 2000, 7).unwrap();
        assert_eq!(a, b);
        let c = run(&config.clone().with_seed(100), 2000, 7).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn stride_keeps_last_step() {
        let n = 10;
        let config = EngineConfig::ea(3, n, kflip(1, n));
        let rec = run(&config, 10, 4).unwrap();
        let ts: Vec<u64> = rec.samples().iter().map(|s| s.0).collect();
        assert_eq!(ts, vec![0, 4, 8, 10]);
        assert!(run(&config, 10, 0).is_err());
    }

    #[test]
    fn validation_rejects_inconsistent_configs() {
        let n = 10;
        assert!(EngineConfig::ea(1, n, kflip(1, n)).validate().is_err());
        assert!(EngineConfig::ea(3, n + 1, kflip(1, n)).validate().is_err());
        let bad_init = EngineConfig::ea(2, 3, kflip(1, 3)).with_init(Init::Explicit(vec![BitString::zeros(3)]));
        assert!(bad_init.validate().is_err());
    }

    #[test]
    fn without_replacement_picks_distinct_parents() {
        // Two distinct members; AND of distinct complementary parents is all zeros,
        // so with distinct parents the pre-mutation child never equals a parent.
        let n = 6;
        let members = vec![BitString::zeros(n), BitString::ones(n)];
        let config = EngineConfig::ga(
            2,
            n,
            MutationOp::standard_bit(Rate::zero(), n).unwrap(),
            CrossoverOp::of(CrossoverKind::Or),
            Rate::one(),
        )
        .with_parent_sampling(ParentSampling::WithoutReplacement);
        let mut rng = config.rng();
        for _ in 0..100 {
            let mut pop = Population::new(members.clone()).unwrap();
            let out = step(&config, &mut pop, &mut rng);
            assert_eq!(out.offspring, BitString::ones(n));
        }
    }

    #[test]
    fn run_until_reports_stopping_time() {
        let n = 12;
        let config = EngineConfig::ea(2, n, kflip(n, n));
        let mut pop = Population::monomorphic(2, n).unwrap();
        let mut rng = config.rng();
        let hit = run_until(&config, &mut pop, &mut rng, 10, |s| s > 0).unwrap();
        assert_eq!(hit, (1, 2 * n as u64));
        let mut pop = Population::monomorphic(2, n).unwrap();
        assert_eq!(run_until(&config, &mut pop, &mut rng, 10, |s| s == 0), Some((0, 0)));
    }
}

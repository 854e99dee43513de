use std::collections::BTreeMap;

use popdiv::crossover::catalogue;
use popdiv::experiments::trial_rng;
use popdiv::oracle::{enumerate_populations, Certifier, DriftEnumerator, FormulaCheck, Limits, Mode, StatSettings};
use popdiv::rational::to_f64;
use popdiv::stats::{bonferroni_z, Moments};
use popdiv::{hamming, BitString, CrossoverOp, EngineConfig, MutationOp, ParentSampling, Rate, TieBreaking};

const SAMPLES: u64 = 100_000;

fn b(s: &str) -> BitString {
    s.parse().unwrap()
}

/// Every outcome frequency within 4 binomial sigma of its exact probability,
/// and no outcome outside the support.
fn assert_matches(label: &str, exact: &BTreeMap<BitString, num_rational::BigRational>, mut draw: impl FnMut() -> BitString) {
    let mut counts: BTreeMap<BitString, u64> = BTreeMap::new();
    for _ in 0..SAMPLES {
        *counts.entry(draw()).or_default() += 1;
    }
    for y in counts.keys() {
        assert!(exact.contains_key(y), "{label}: sampled {y} outside the exact support");
    }
    for (y, p) in exact {
        let p = to_f64(p);
        let f = *counts.get(y).unwrap_or(&0) as f64 / SAMPLES as f64;
        let sigma = (p * (1.0 - p) / SAMPLES as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * sigma + 1e-12, "{label}: P({y}) = {p}, observed {f}");
    }
}

#[test]
fn crossover_samplers_match_exact_distributions() {
    let pairs = [("110", "011"), ("100", "011"), ("101", "101"), ("000", "111")];
    for (k, op) in catalogue().iter().filter(|op| op.exact_enumerable()).enumerate() {
        for (i, (x1, x2)) in pairs.iter().enumerate() {
            let (x1, x2) = (b(x1), b(x2));
            let exact = op.exact_distribution(&x1, &x2).unwrap();
            let mut rng = trial_rng(17, (k * 16 + i) as u64);
            assert_matches(&format!("{op} on {x1},{x2}"), &exact, || op.crossover(&x1, &x2, &mut rng).unwrap());
        }
    }
}

#[test]
fn mutation_samplers_match_exact_distributions() {
    for (k, spec) in ["kflip:k=1", "kflip:k=2", "sbm:p=1/4", "sbm:p=1", "heavy:tau=2", "heavy:tau=0"].iter().enumerate() {
        let op = MutationOp::parse(spec, 3).unwrap();
        let x = b("101");
        let exact = op.exact_distribution(&x).unwrap();
        let mut rng = trial_rng(23, k as u64);
        assert_matches(spec, &exact, || op.mutate(&x, &mut rng));
    }
}

#[test]
fn mutation_distance_identity_at_fifty_bits() {
    let n = 50;
    let ops = ["kflip:k=1", "kflip:k=3", "sbm:p=1/n", "sbm:p=1/10", "heavy:tau=3/2"];
    let pairs = 20;
    let z_crit = bonferroni_z(ops.len() * pairs);
    for (k, spec) in ops.iter().enumerate() {
        let op = MutationOp::parse(spec, n).unwrap();
        let chi = op.expected_flips();
        for i in 0..pairs {
            let mut rng = trial_rng(31, (k * pairs + i) as u64);
            let x = BitString::random(n, &mut rng);
            let z = BitString::random(n, &mut rng);
            let expected = chi + (1.0 - 2.0 * chi / n as f64) * hamming(&z, &x).unwrap() as f64;
            let m: Moments = (0..20_000).map(|_| hamming(&z, &op.mutate(&x, &mut rng)).unwrap() as f64).collect();
            assert!(
                (m.mean() - expected).abs() <= z_crit * m.standard_error() + 1e-9,
                "{spec}: mean {} expected {expected}",
                m.mean()
            );
        }
    }
}

#[test]
fn mutation_operators_are_unbiased_and_satisfy_the_distance_identity() {
    let c = Certifier::default();
    for n in 1..=3 {
        for spec in ["kflip:k=1", "sbm:p=1/3", "sbm:p=0", "heavy:tau=3", "heavy:tau=-1"] {
            let op = MutationOp::parse(spec, n).unwrap();
            assert!(c.mutation_unbiased(&op).unwrap().holds, "{spec} n={n}");
            assert_eq!(c.mutation_distance_identity(&op).unwrap(), None, "{spec} n={n}");
        }
    }
}

#[test]
fn respectful_operators_at_32_bits() {
    let c = Certifier::new(
        Limits::default(),
        StatSettings {
            samples_per_case: 1,
            max_cases: 10_000,
            seed: 99,
        },
    );
    for spec in ["uniform:c=1/2", "uniform:c=1/4", "kpoint:k=1", "kpoint:k=3", "boring", "shrinking", "balanced-uniform", "and", "or"] {
        let v = c.respectful(&CrossoverOp::parse(spec).unwrap(), 32, Mode::Statistical).unwrap();
        assert!(v.holds, "{spec}: {:?}", v.witness);
    }
    for spec in ["counter", "zerolen", "mapones", "balanced-2pt", "alternating"] {
        let v = c.respectful(&CrossoverOp::parse(spec).unwrap(), 32, Mode::Statistical).unwrap();
        assert!(!v.holds, "{spec} should not be respectful");
    }
}

#[test]
fn boring_ga_has_the_ea_step_distribution() {
    for mu in 2..=3 {
        for n in 1..=3 {
            let mutation = MutationOp::parse("sbm:p=1/3", n).unwrap();
            let mut ea = DriftEnumerator::new(&EngineConfig::ea(mu, n, mutation.clone())).unwrap();
            for pc in [Rate::zero(), Rate::new(1, 3), Rate::one()] {
                for sampling in [ParentSampling::WithReplacement, ParentSampling::WithoutReplacement] {
                    let config = EngineConfig::ga(mu, n, mutation.clone(), CrossoverOp::boring(), pc).with_parent_sampling(sampling);
                    let mut ga = DriftEnumerator::new(&config).unwrap();
                    for pop in enumerate_populations(mu, n).unwrap() {
                        assert_eq!(
                            ga.next_population_distribution(&pop).unwrap(),
                            ea.next_population_distribution(&pop).unwrap(),
                            "mu={mu} n={n} pc={pc} {sampling:?} {pop:?}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn drift_formula_without_replacement_and_with_uniform_ties() {
    for mu in 2..=3 {
        for n in 1..=3 {
            for spec in ["uniform:c=1/2", "kpoint:k=1", "shrinking"] {
                for tie in [TieBreaking::PreferOffspring, TieBreaking::UniformRandom] {
                    let config = EngineConfig::ga(mu, n, MutationOp::k_bit_flip(1, n).unwrap(), CrossoverOp::parse(spec).unwrap(), Rate::one())
                        .with_parent_sampling(ParentSampling::WithoutReplacement)
                        .with_tie_breaking(tie);
                    let check = FormulaCheck::run(&config).unwrap();
                    assert!(check.passed(), "{spec} mu={mu} n={n} {tie:?}: {:?}", check.mismatches.first());
                }
            }
        }
    }
}

use num_rational::BigRational;
use num_traits::One;
use popdiv::engine::{run, step};
use popdiv::theory::exact;
use popdiv::{BitString, CrossoverOp, EngineConfig, MutationOp, Population, Rate, TheoryParams, TieBreaking};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn population(max_mu: usize, max_n: usize) -> impl Strategy<Value = Population> {
    (1..=max_mu, 1..=max_n).prop_flat_map(|(mu, n)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), n), mu)
            .prop_map(|rows| Population::new(rows.iter().map(|r| BitString::from_bits(r)).collect()).unwrap())
    })
}

fn crossover_spec() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..=8).prop_map(|p| format!("uniform:c={p}/8")),
        (1usize..5).prop_map(|k| format!("kpoint:k={k}")),
        prop::sample::select(vec![
            "boring",
            "shrinking",
            "balanced-uniform",
            "alternating",
            "counter",
            "zerolen",
            "mapones",
            "balanced-2pt",
            "and",
            "or",
        ])
        .prop_map(String::from),
    ]
}

fn mutation_spec(n: usize) -> impl Strategy<Value = MutationOp> {
    prop_oneof![
        (1..=n).prop_map(move |k| MutationOp::k_bit_flip(k, n).unwrap()),
        (0i64..=4).prop_map(move |p| MutationOp::standard_bit(Rate::new(p, 4), n).unwrap()),
        (0i64..=6).prop_map(move |t| MutationOp::heavy_tailed(Rate::new(t, 2), n).unwrap()),
    ]
}

proptest! {
    #[test]
    fn cached_diversity_tracks_replacements(pop in population(8, 70), seed in any::<u64>(), rounds in 1usize..30) {
        let mut pop = pop;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mu, n) = (pop.mu(), pop.n());
        for _ in 0..rounds {
            let before = pop.diversity();
            let idx = rand::Rng::gen_range(&mut rng, 0..mu);
            pop.replace(idx, BitString::random(n, &mut rng)).unwrap();
            prop_assert_eq!(pop.diversity(), pop.recompute_diversity());
            prop_assert!(pop.diversity() <= (mu * mu * n / 2) as u64);
            prop_assert!(pop.diversity().abs_diff(before) <= 2 * (mu as u64 - 1) * n as u64);
        }
        let total: u64 = pop.members().iter().map(|x| pop.point_diversity(x).unwrap()).sum();
        prop_assert_eq!(total, pop.diversity());
    }

    #[test]
    fn steps_respect_the_bound_and_are_reproducible(
        mu in 2usize..7,
        n in 1usize..40,
        spec in crossover_spec(),
        pc in 0i64..=3,
        uniform_tie in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mutation = MutationOp::k_bit_flip(1, n).unwrap();
        let tie = if uniform_tie { TieBreaking::UniformRandom } else { TieBreaking::PreferOffspring };
        let config = EngineConfig::ga(mu, n, mutation, CrossoverOp::parse(&spec).unwrap(), Rate::new(pc, 3))
            .with_tie_breaking(tie)
            .with_seed(seed);
        let mut pop = config.initial_population().unwrap();
        let mut rng = config.rng();
        for _ in 0..60 {
            let before = pop.diversity();
            let out = step(&config, &mut pop, &mut rng);
            prop_assert_eq!(out.offspring.len(), n);
            prop_assert!(out.diversity_after.abs_diff(before) <= config.max_step_change());
            prop_assert_eq!(pop.diversity(), pop.recompute_diversity());
        }
        prop_assert_eq!(run(&config, 60, 1).unwrap(), run(&config, 60, 1).unwrap());
    }

    #[test]
    fn mutation_spec_strings_round_trip(op in (1usize..50).prop_flat_map(mutation_spec)) {
        let again = MutationOp::parse(&op.to_string(), op.n()).unwrap();
        prop_assert_eq!(again, op);
    }

    #[test]
    fn crossover_spec_strings_round_trip(spec in crossover_spec()) {
        let op = CrossoverOp::parse(&spec).unwrap();
        prop_assert_eq!(CrossoverOp::parse(&op.to_string()).unwrap(), op);
    }

    #[test]
    fn offspring_length_and_ones_preservation(
        (x1, x2) in (1usize..40).prop_flat_map(|n| (prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n))),
        spec in crossover_spec(),
        seed in any::<u64>(),
    ) {
        let (x1, x2) = (BitString::from_bits(&x1), BitString::from_bits(&x2));
        let op = CrossoverOp::parse(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = op.crossover(&x1, &x2, &mut rng).unwrap();
        prop_assert_eq!(y.len(), x1.len());
        if matches!(spec.as_str(), "counter" | "balanced-2pt") {
            prop_assert_eq!(y.count_ones(), x1.count_ones());
        }
    }

    #[test]
    fn drift_is_a_contraction_with_its_fixed_point(mu in 2usize..60, n in 1usize..500, chi_frac in 0.001f64..1.0) {
        let chi = (chi_frac * n as f64).max(1e-3);
        let p = TheoryParams::new(mu, n, chi, 1.0).unwrap();
        let c = p.alpha_delta();
        // A contraction always; the slope is also positive once chi < n / 2,
        // where delta < 2 / mu.
        prop_assert!(c.delta > 0.0 && c.delta < 2.0);
        if chi < n as f64 / 2.0 {
            prop_assert!(c.delta < 2.0 / mu as f64 + 1e-12 && c.delta <= 1.0);
        }
        let s0 = p.equilibrium();
        prop_assert!((p.predicted_drift(s0) - s0).abs() <= 1e-9 * s0.max(1.0));
        let slope = p.predicted_drift(1.0) - p.predicted_drift(0.0);
        prop_assert!((slope - (1.0 - c.delta)).abs() < 1e-9);
        let tie = p.with_tie_breaking(TieBreaking::UniformRandom).alpha_delta();
        prop_assert!((tie.alpha / tie.delta - s0).abs() <= 1e-9 * s0);
    }

    #[test]
    fn equilibrium_is_monotone(mu in 2usize..40, n in 1usize..300, chi_frac in 0.01f64..0.9) {
        let chi = chi_frac * n as f64;
        let s0 = |mu: usize, n: usize, chi: f64| TheoryParams::new(mu, n, chi, 1.0).unwrap().equilibrium();
        let base = s0(mu, n, chi);
        prop_assert!(s0(mu + 1, n, chi) > base);
        prop_assert!(s0(mu, n + 1, chi) > base);
        prop_assert!(s0(mu, n, chi * 1.05) > base);
    }

    #[test]
    fn exact_fixed_point(mu in 2usize..20, n in 1usize..50, num in 1i64..40) {
        prop_assume!(num <= 8 * n as i64);
        let chi = BigRational::new(num.into(), 8.into());
        let s0 = exact::equilibrium(mu, n, &chi);
        let (alpha, delta) = exact::alpha_delta(mu, n, &chi, TieBreaking::PreferOffspring);
        prop_assert_eq!((BigRational::one() - delta) * &s0 + alpha, s0);
    }
}

#[test]
fn max_diversity_start_can_sit_below_the_down_threshold() {
    // mu = n = 16, chi = 1, eps = 1: S(max) = 2048 but (1 + eps) S0 = 2671.3.
    let p = TheoryParams::new(16, 16, 1.0, 1.0).unwrap();
    let start = Population::max_diversity(16, 16).unwrap();
    assert_eq!(start.diversity(), 2048);
    assert!((start.diversity() as f64) < 2.0 * p.equilibrium());
    // With eps = 1/2 the start is above the threshold again.
    assert!((start.diversity() as f64) > 1.5 * p.equilibrium());
}

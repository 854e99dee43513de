//! A non-neutral crossover pulls the drift below the neutral prediction.

use popdiv::experiments::drift_check;
use popdiv::{BitString, CrossoverOp, EngineConfig, MutationOp, Population, Rate};

fn main() -> popdiv::Result<()> {
    let n = 40;
    let x: BitString = BitString::from_bits(&(0..n).map(|i| i % 2 == 0).collect::<Vec<_>>());
    // The AND of the complementary pair is the third member, so it only adds clones.
    let start = Population::new(vec![x.clone(), x.complement(), BitString::zeros(n)])?;
    for op in ["uniform:c=1/2", "and"] {
        let config = EngineConfig::ga(3, n, MutationOp::k_bit_flip(1, n)?, CrossoverOp::parse(op)?, Rate::one()).with_seed(2);
        let r = drift_check(&config, &start, 20_000)?;
        println!("{op:<14} S={} predicted {:.2} empirical {:.2} pass={}", r.s_start, r.predicted, r.empirical, r.pass);
    }
    Ok(())
}

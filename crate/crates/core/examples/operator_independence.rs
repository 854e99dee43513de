//! Two mutation operators with the same expected flip count give the same drift.

use popdiv::experiments::operator_independence;
use popdiv::{EngineConfig, MutationOp, Population};

fn main() -> popdiv::Result<()> {
    let (mu, n) = (5, 100);
    let a = EngineConfig::ea(mu, n, MutationOp::parse("kflip:k=1", n)?).with_seed(11);
    let b = EngineConfig::ea(mu, n, MutationOp::parse("sbm:p=1/n", n)?).with_seed(12);
    let r = operator_independence(&a, &b, &Population::max_diversity(mu, n)?, 20_000)?;
    println!("kflip {:.3} vs sbm {:.3}: difference {:.3}, 4 se = {:.3}", r.a.empirical, r.b.empirical, r.difference, 4.0 * r.combined_se);
    Ok(())
}

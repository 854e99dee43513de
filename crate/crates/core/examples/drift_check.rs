//! Monte Carlo one-step drift from three start populations, against the formula.

use popdiv::experiments::{drift_campaign, population_near, theory_for};
use popdiv::{EngineConfig, MutationOp, Population};

fn main() -> popdiv::Result<()> {
    let (mu, n) = (5, 100);
    let config = EngineConfig::ea(mu, n, MutationOp::parse("sbm:p=1/n", n)?).with_seed(1);
    let s0 = theory_for(&config, 1.0)?.equilibrium();
    let starts = [
        Population::monomorphic(mu, n)?,
        population_near(mu, n, s0)?,
        Population::max_diversity(mu, n)?,
    ];
    let cases: Vec<_> = starts.into_iter().map(|p| (config.clone(), p)).collect();
    let campaign = drift_campaign(&cases, 20_000)?;
    for e in &campaign.entries {
        println!("S={:<5} predicted {:>9.3} empirical {:>9.3} (se {:.3}) {}", e.s_start, e.predicted, e.empirical, e.se, e.pass);
    }
    Ok(())
}

//! Prefer-offspring against uniform tie-breaking: scaled drift, same fixed point.

use popdiv::experiments::tie_breaking_comparison;
use popdiv::{EngineConfig, MutationOp, Population};

fn main() -> popdiv::Result<()> {
    for mu in [2, 10] {
        let n = 20;
        let config = EngineConfig::ea(mu, n, MutationOp::k_bit_flip(1, n)?).with_seed(3);
        let r = tie_breaking_comparison(&config, &Population::monomorphic(mu, n)?, 20_000)?;
        println!(
            "mu={mu}: prefer {:.3} (pred {:.3}), uniform {:.3} (pred {:.3}), scale {:.4}, S0 {:.3} / {:.3}",
            r.prefer.empirical, r.prefer.predicted, r.uniform.empirical, r.uniform.predicted, r.scale, r.s0_prefer, r.s0_uniform
        );
    }
    Ok(())
}

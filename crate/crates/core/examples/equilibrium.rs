//! Time-averaged diversity of a long run against the equilibrium S0.

use popdiv::experiments::equilibrium_check;
use popdiv::{EngineConfig, MutationOp};

fn main() -> popdiv::Result<()> {
    let n = 64;
    let config = EngineConfig::ea(8, n, MutationOp::k_bit_flip(1, n)?).with_seed(5);
    let r = equilibrium_check(&config, 20_000, 200_000)?;
    println!("time average {:.2}, S0 {:.2}, relative error {:.4}", r.time_average, r.s0, r.relative_error);
    Ok(())
}

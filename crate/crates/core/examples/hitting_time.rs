//! First passage into the band around S0, from above and from below.

use popdiv::experiments::{hitting_time_experiment, Direction};
use popdiv::{EngineConfig, MutationOp};

fn main() -> popdiv::Result<()> {
    let n = 64;
    let config = EngineConfig::ea(8, n, MutationOp::k_bit_flip(1, n)?).with_seed(9);
    for direction in [Direction::Down, Direction::Up] {
        let r = hitting_time_experiment(&config, 0.5, direction, 50)?;
        println!(
            "{direction:?}: start S={} threshold {:.1}, mean {:.1} <= bound {:.1}? {:?}",
            r.start_diversity, r.threshold, r.mean, r.bound, r.status
        );
    }
    Ok(())
}

//! Writes a GA diversity trajectory as CSV to standard output.

use popdiv::engine::run;
use popdiv::{CrossoverOp, EngineConfig, MutationOp, Rate};

fn main() -> popdiv::Result<()> {
    let n = 32;
    let config = EngineConfig::ga(6, n, MutationOp::parse("sbm:p=1/n", n)?, CrossoverOp::parse("uniform:c=1/2")?, Rate::one())
        .with_seed(42);
    let record = run(&config, 2000, 50)?;
    record.write_csv(std::io::stdout().lock()).expect("stdout");
    Ok(())
}

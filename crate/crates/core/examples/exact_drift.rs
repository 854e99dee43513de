//! Enumerates one generation exactly and compares with the drift formula.

use popdiv::oracle::{exact_one_step_drift, FormulaCheck};
use popdiv::{CrossoverOp, EngineConfig, MutationOp, Population, Rate};

fn main() -> popdiv::Result<()> {
    let config = EngineConfig::ea(2, 2, MutationOp::k_bit_flip(1, 2)?);
    let pop = Population::parse(&["00", "11"])?;
    println!("E[S'] from {{00, 11}} = {}", exact_one_step_drift(&config, &pop)?);

    for op in ["uniform:c=1/2", "kpoint:k=1", "shrinking", "and"] {
        let config = EngineConfig::ga(3, 3, MutationOp::parse("sbm:p=1/4", 3)?, CrossoverOp::parse(op)?, Rate::new(1, 2));
        let check = FormulaCheck::run(&config)?;
        println!("{op:<14} {} populations, {} differ from the formula", check.populations, check.mismatches.len());
    }
    Ok(())
}

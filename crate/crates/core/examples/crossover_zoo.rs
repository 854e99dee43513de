//! Exact offspring distributions of every enumerable operator on one parent pair.

use popdiv::crossover::catalogue;
use popdiv::BitString;

fn main() -> popdiv::Result<()> {
    let x1: BitString = "1100".parse()?;
    let x2: BitString = "1010".parse()?;
    println!("parents {x1} x {x2}");
    for op in catalogue() {
        if !op.exact_enumerable() {
            println!("{op:<16} (sampled only)");
            continue;
        }
        let dist = op.exact_distribution(&x1, &x2)?;
        let cells: Vec<String> = dist.iter().map(|(y, p)| format!("{y}:{p}")).collect();
        println!("{op:<16} {}", cells.join(" "));
    }
    Ok(())
}

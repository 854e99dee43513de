//! Certifies one crossover given on the command line, e.g. `-- shrinking 3`.

use popdiv::oracle::Certifier;
use popdiv::CrossoverOp;

fn main() -> popdiv::Result<()> {
    let mut args = std::env::args().skip(1);
    let op = CrossoverOp::parse(&args.next().unwrap_or_else(|| "uniform:c=1/4".into()))?;
    let n = args.next().map_or(3, |a| a.parse().expect("n must be an integer"));
    let row = Certifier::default().classify(&op, n)?;
    for v in [Some(&row.diversity_neutral), Some(&row.respectful), row.oim.as_ref(), row.unbiased.as_ref()].into_iter().flatten() {
        let witness = v.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
        println!("{:<18} {:<5} {:?} {witness}", v.property.to_string(), v.holds, v.mode);
    }
    Ok(())
}

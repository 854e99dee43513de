//! Certifies every catalogued crossover at n = 3 and prints the table.
//!
//! Run with `cargo run --release --example classify -- [n]`.

use popdiv::oracle::classification_report;

fn main() -> popdiv::Result<()> {
    let n = std::env::args().nth(1).map_or(3, |a| a.parse().expect("n must be an integer"));
    let report = classification_report(n)?;
    print!("{}", report.render_text());
    if !report.consistent() {
        std::process::exit(1);
    }
    Ok(())
}

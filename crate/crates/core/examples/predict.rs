//! Closed-form drift coefficients, equilibrium and hitting-time bounds.

use popdiv::TheoryParams;

fn main() -> popdiv::Result<()> {
    for (mu, n, chi) in [(2, 10, 1.0), (8, 64, 1.0), (16, 16, 1.0), (50, 100, 2.0)] {
        let p = TheoryParams::new(mu, n, chi, 0.5)?.predict();
        println!(
            "mu={mu:<3} n={n:<4} chi={chi}: alpha={:.3} delta={:.5} S0={:.3} down<={:.1} up<={:.1} nonskip={}",
            p.alpha, p.delta, p.s0, p.down_bound, p.up_bound, p.non_skip
        );
    }
    Ok(())
}

//! Closed-form diversity dynamics.
//!
//! For every unbiased mutation flipping `chi` bits in expectation, and every
//! diversity-neutral crossover, one generation on a flat landscape satisfies
//!
//! ```text
//! E[S(P_{t+1}) | P_t] = (1 - delta) S(P_t) + alpha
//! alpha = 2 (mu - 1) chi
//! delta = 2 / mu^2 + 4 (mu - 1) chi / (mu^2 n)
//! ```
//!
//! so `S0 = alpha / delta` is the equilibrium. Uniform tie-breaking scales both
//! coefficients by `mu / (mu + 1)` and leaves `S0` unchanged.
//!
//! The asymptotic forms of the hitting-time bounds (`O(mu^2 ln n)` down,
//! `O(n ln n)` up for constant `eps` and `chi`) are not computed here; only the
//! concrete bounds are.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::engine::TieBreaking;
use crate::error::{usage, Result};
use crate::rational::big;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryParams {
    pub mu: usize,
    pub n: usize,
    pub chi: f64,
    pub eps: f64,
    pub tie_breaking: TieBreaking,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftCoefficients {
    pub alpha: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HittingTimeBounds {
    /// Bound on `E[T_down]`, the time to fall to `(1 + eps) S0`.
    pub down: f64,
    /// Bound on `E[T_up]`, the time to climb to `(1 - eps) S0`.
    pub up: f64,
    /// Largest diversity used by the down bound, `mu^2 n / 2`.
    pub x_max: f64,
    /// Largest one-step change, `2 (mu - 1) n`.
    pub delta_max: f64,
}

/// Everything the `predict` command reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub params: TheoryParams,
    pub alpha: f64,
    pub delta: f64,
    pub s0: f64,
    pub down_bound: f64,
    pub up_bound: f64,
    pub non_skip: bool,
}

impl TheoryParams {
    pub fn new(mu: usize, n: usize, chi: f64, eps: f64) -> Result<Self> {
        let p = TheoryParams {
            mu,
            n,
            chi,
            eps,
            tie_breaking: TieBreaking::PreferOffspring,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tie_breaking(mut self, tie: TieBreaking) -> Self {
        self.tie_breaking = tie;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu < 2 {
            return usage(format!("mu must be at least 2, got {}", self.mu));
        }
        if self.n == 0 {
            return usage("n must be positive");
        }
        if !(self.chi > 0.0 && self.chi <= self.n as f64) {
            return usage(format!("chi must lie in (0, n], got {}", self.chi));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return usage(format!("eps must lie in (0, 1], got {}", self.eps));
        }
        Ok(())
    }

    /// `mu / (mu + 1)` under uniform tie-breaking, otherwise 1.
    pub fn tie_scale(&self) -> f64 {
        match self.tie_breaking {
            TieBreaking::PreferOffspring => 1.0,
            TieBreaking::UniformRandom => self.mu as f64 / (self.mu as f64 + 1.0),
        }
    }

    pub fn alpha_delta(&self) -> DriftCoefficients {
        let mu = self.mu as f64;
        let n = self.n as f64;
        let alpha = 2.0 * (mu - 1.0) * self.chi;
        let delta = 2.0 / (mu * mu) + 4.0 * (mu - 1.0) * self.chi / (mu * mu * n);
        let scale = self.tie_scale();
        DriftCoefficients {
            alpha: scale * alpha,
            delta: scale * delta,
        }
    }

    /// `S0 = (mu - 1) mu^2 chi n / (2 (mu - 1) chi + n)`.
    pub fn equilibrium(&self) -> f64 {
        let mu = self.mu as f64;
        let n = self.n as f64;
        (mu - 1.0) * mu * mu * self.chi * n / (2.0 * (mu - 1.0) * self.chi + n)
    }

    /// `E[S(P_{t+1}) | S(P_t) = s]`.
    pub fn predicted_drift(&self, s: f64) -> f64 {
        let DriftCoefficients { alpha, delta } = self.alpha_delta();
        (1.0 - delta) * s + alpha
    }

    pub fn x_max(&self) -> f64 {
        (self.mu * self.mu) as f64 * self.n as f64 / 2.0
    }

    pub fn delta_max(&self) -> f64 {
        2.0 * (self.mu as f64 - 1.0) * self.n as f64
    }

    pub fn hitting_time_bounds(&self) -> HittingTimeBounds {
        let DriftCoefficients { alpha, delta } = self.alpha_delta();
        let eps = self.eps;
        let x_max = self.x_max();
        let delta_max = self.delta_max();
        let down_arg = 2.0 * delta * x_max / (eps * alpha);
        let up_arg = (2.0 * alpha + 2.0 * delta * delta_max) / (eps * alpha);
        assert!(down_arg > 1.0 && up_arg > 1.0, "logarithm arguments must exceed 1");
        HittingTimeBounds {
            down: 4.0 / (eps * delta) * down_arg.ln(),
            up: 4.0 * delta_max / (eps * alpha) * up_arg.ln(),
            x_max,
            delta_max,
        }
    }

    /// `eps mu^2 chi >= n + 2 (mu - 1) chi`: the first crossing cannot jump over the band.
    pub fn non_skip_condition(&self) -> bool {
        let mu = self.mu as f64;
        self.eps * mu * mu * self.chi >= self.n as f64 + 2.0 * (mu - 1.0) * self.chi
    }

    pub fn predict(&self) -> Prediction {
        let DriftCoefficients { alpha, delta } = self.alpha_delta();
        let bounds = self.hitting_time_bounds();
        Prediction {
            params: *self,
            alpha,
            delta,
            s0: self.equilibrium(),
            down_bound: bounds.down,
            up_bound: bounds.up,
            non_skip: self.non_skip_condition(),
        }
    }
}

/// Exact-rational forms of the drift formula, for comparison with enumeration.
pub mod exact {
    use super::*;

    pub fn tie_scale(mu: usize, tie: TieBreaking) -> BigRational {
        match tie {
            TieBreaking::PreferOffspring => BigRational::one(),
            TieBreaking::UniformRandom => big(mu as i64) / big(mu as i64 + 1),
        }
    }

    /// `(alpha, delta)` as exact rationals.
    pub fn alpha_delta(mu: usize, n: usize, chi: &BigRational, tie: TieBreaking) -> (BigRational, BigRational) {
        let m = big(mu as i64);
        let m1 = big(mu as i64 - 1);
        let nn = big(n as i64);
        let alpha = big(2) * &m1 * chi;
        let delta = big(2) / (&m * &m) + big(4) * &m1 * chi / (&m * &m * nn);
        let scale = tie_scale(mu, tie);
        (&scale * alpha, scale * delta)
    }

    pub fn predicted_drift(mu: usize, n: usize, chi: &BigRational, tie: TieBreaking, s: u64) -> BigRational {
        let (alpha, delta) = alpha_delta(mu, n, chi, tie);
        (BigRational::one() - delta) * big(s as i64) + alpha
    }

    pub fn equilibrium(mu: usize, n: usize, chi: &BigRational) -> BigRational {
        let (alpha, delta) = alpha_delta(mu, n, chi, TieBreaking::PreferOffspring);
        alpha / delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::big_ratio;

    fn params(mu: usize, n: usize, chi: f64, eps: f64) -> TheoryParams {
        TheoryParams::new(mu, n, chi, eps).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn alpha_delta_examples() {
        let c = params(2, 10, 1.0, 1.0).alpha_delta();
        assert!(close(c.alpha, 2.0));
        assert!(close(c.delta, 0.6));
        let big_n = params(2, 1_000_000_000, 1.0, 1.0).alpha_delta();
        assert!((big_n.delta - 0.5).abs() < 1e-8);
        let tie = params(2, 10, 1.0, 1.0).with_tie_breaking(TieBreaking::UniformRandom).alpha_delta();
        assert!(close(tie.alpha, 2.0 * 2.0 / 3.0));
        assert!(close(tie.delta, 0.6 * 2.0 / 3.0));
    }

    #[test]
    fn equilibrium_examples() {
        assert!(close(params(2, 10, 1.0, 1.0).equilibrium(), 10.0 / 3.0));
        assert!(close(params(8, 64, 1.0, 1.0).equilibrium(), 28672.0 / 78.0));
        // Strong mutation: close to mu^2 n / 2.
        let p = params(50, 10, 10.0, 1.0);
        assert!(p.equilibrium() / p.x_max() > 0.98);
    }

    #[test]
    fn average_distance_is_bounded() {
        for mu in 2..12 {
            for n in [1, 5, 64] {
                for chi in [0.5, 1.0, n as f64] {
                    let p = params(mu, n, chi, 1.0);
                    let avg = p.equilibrium() / (mu * mu) as f64;
                    assert!(avg <= ((mu - 1) as f64 * chi).min(n as f64 / 2.0) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn drift_examples() {
        let p = params(2, 10, 1.0, 1.0);
        assert!(close(p.predicted_drift(4.0), 3.6));
        assert!(close(p.predicted_drift(0.0), 2.0));
        assert!(close(p.predicted_drift(p.equilibrium()), p.equilibrium()));
        assert_eq!(exact::predicted_drift(2, 10, &big(1), TieBreaking::PreferOffspring, 4), big_ratio(18, 5));
    }

    #[test]
    fn hitting_time_examples() {
        let b = params(2, 10, 1.0, 1.0).hitting_time_bounds();
        assert!(close(b.down, 20.0 / 3.0 * 12f64.ln()));
        assert!(close(b.up, 40.0 * 14f64.ln()));
        assert_eq!(b.delta_max, 20.0);
    }

    #[test]
    fn non_skip_examples() {
        for n in 2..40 {
            assert!(params(n, n, 1.0, 1.0).non_skip_condition(), "mu = n = {n}");
            assert!(!params(2, n, n as f64, 1.0 / 3.0).non_skip_condition());
        }
        assert!(TheoryParams::new(2, 10, 1.0, 0.0).is_err());
        assert!(TheoryParams::new(2, 10, 11.0, 0.5).is_err());
        assert!(TheoryParams::new(1, 10, 1.0, 0.5).is_err());
    }

    #[test]
    fn tie_breaking_keeps_the_fixed_point() {
        for mu in [2, 3, 10] {
            let chi = big_ratio(3, 2);
            let (a, d) = exact::alpha_delta(mu, 7, &chi, TieBreaking::PreferOffspring);
            let (at, dt) = exact::alpha_delta(mu, 7, &chi, TieBreaking::UniformRandom);
            assert_eq!(&a / &d, &at / &dt);
            assert_eq!(at / a, big_ratio(mu as i64, mu as i64 + 1));
        }
    }
}

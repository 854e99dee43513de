//! Sample statistics shared by the statistical oracle and the experiments.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided tail mass of a 4-sigma normal test.
pub fn four_sigma_tail() -> f64 {
    2.0 * (1.0 - standard_normal().cdf(4.0))
}

/// Critical z for a 4-sigma family-wise test split over `tests` comparisons.
///
/// Returns exactly 4 for a single test.
pub fn bonferroni_z(tests: usize) -> f64 {
    if tests <= 1 {
        return 4.0;
    }
    let tail = four_sigma_tail() / tests as f64;
    standard_normal().inverse_cdf(1.0 - tail / 2.0)
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Parameters of a statistical comparison, recorded next to its verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestParams {
    pub samples_per_case: u64,
    pub cases: usize,
    pub z_critical: f64,
    pub absolute_floor: f64,
    pub seed: u64,
}

/// `|observed - expected| <= z * se + floor`.
pub fn within_tolerance(observed: f64, expected: f64, se: f64, z: f64, floor: f64) -> bool {
    (observed - expected).abs() <= z * se + floor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bonferroni_grows_with_tests() {
        assert_eq!(bonferroni_z(1), 4.0);
        let z2 = bonferroni_z(2);
        let z512 = bonferroni_z(512);
        assert!(z2 > 4.0 && z512 > z2 && z512 < 6.0, "{z2} {z512}");
        assert!((four_sigma_tail() - 6.334e-5).abs() < 1e-7);
    }

    #[test]
    fn moments_match_direct_formulas() {
        let m: Moments = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert_eq!(m.mean(), 2.5);
        assert!((m.variance() - 5.0 / 3.0).abs() < 1e-12);
        assert!((m.standard_error() - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }
}

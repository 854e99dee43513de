//! Exact small-instance oracles.
//!
//! [`drift`] enumerates one generation completely (parents, crossover outcome,
//! mutation outcome, removal index) in exact rational arithmetic. [`certify`]
//! decides the four crossover properties the drift theory depends on, exactly
//! where the operator's output distribution can be enumerated and by seeded
//! Monte Carlo otherwise. [`report`] runs every catalogued operator through
//! the certifier and cross-checks the implications between the properties.

use std::fmt;

use log::warn;
use serde::Serialize;

use crate::bitstring::BitString;
use crate::error::{capability, Result};
use crate::stats::TestParams;

pub mod certify;
pub mod drift;
pub mod report;

pub use certify::{characteristic_sides, Certifier, StatSettings};
pub use drift::{enumerate_populations, exact_one_step_drift, DriftEnumerator, FormulaCheck};
pub use report::{classification_report, ClassificationReport};

/// Size limits for enumeration.
///
/// Raising any of them above the defaults is allowed and logs a warning,
/// since the work grows exponentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub certify_max_n: usize,
    pub drift_max_n: usize,
    pub drift_max_mu: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            certify_max_n: 3,
            drift_max_n: 4,
            drift_max_mu: 3,
        }
    }
}

impl Limits {
    pub fn new(certify_max_n: usize, drift_max_n: usize, drift_max_mu: usize) -> Self {
        let limits = Limits {
            certify_max_n,
            drift_max_n,
            drift_max_mu,
        };
        let d = Limits::default();
        if certify_max_n > d.certify_max_n || drift_max_n > d.drift_max_n || drift_max_mu > d.drift_max_mu {
            warn!("enumeration limits raised to {limits:?}; cost grows exponentially in n and mu");
        }
        limits
    }

    pub(crate) fn check_certify(&self, n: usize) -> Result<()> {
        if n > self.certify_max_n {
            return capability(format!("exact certification limited to n <= {}, got {n}", self.certify_max_n));
        }
        Ok(())
    }

    pub(crate) fn check_drift(&self, mu: usize, n: usize) -> Result<()> {
        if n > self.drift_max_n || mu > self.drift_max_mu {
            return capability(format!(
                "drift enumeration limited to n <= {} and mu <= {}, got n = {n}, mu = {mu}",
                self.drift_max_n, self.drift_max_mu
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    DiversityNeutral,
    Respectful,
    Oim,
    Unbiased,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::DiversityNeutral => "diversity-neutral",
            Property::Respectful => "respectful",
            Property::Oim => "oim",
            Property::Unbiased => "unbiased",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Statistical,
}

/// A counterexample. Which fields are set depends on the property:
/// `z` for the characteristic equation, `offspring` for respectfulness,
/// `permutation` and `z` for unbiasedness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "as_string")]
    pub x1: BitString,
    #[serde(serialize_with = "as_string")]
    pub x2: BitString,
    #[serde(serialize_with = "opt_as_string")]
    pub z: Option<BitString>,
    #[serde(serialize_with = "opt_as_string")]
    pub offspring: Option<BitString>,
    pub permutation: Option<Vec<usize>>,
    /// Exact rationals print as `p/q`; statistical estimates as decimals.
    pub measured: String,
    pub expected: String,
}

impl Witness {
    pub(crate) fn pair(x1: &BitString, x2: &BitString, measured: impl ToString, expected: impl ToString) -> Self {
        Witness {
            x1: x1.clone(),
            x2: x2.clone(),
            z: None,
            offspring: None,
            permutation: None,
            measured: measured.to_string(),
            expected: expected.to_string(),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x1={} x2={}", self.x1, self.x2)?;
        if let Some(z) = &self.z {
            write!(f, " z={z}")?;
        }
        if let Some(y) = &self.offspring {
            write!(f, " offspring={y}")?;
        }
        if let Some(p) = &self.permutation {
            write!(f, " sigma={p:?}")?;
        }
        write!(f, ": measured {} vs expected {}", self.measured, self.expected)
    }
}

fn as_string<S: serde::Serializer>(x: &BitString, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

fn opt_as_string<S: serde::Serializer>(x: &Option<BitString>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub property: Property,
    pub holds: bool,
    pub mode: Mode,
    pub witness: Option<Witness>,
    /// Present exactly when `mode` is statistical.
    pub confidence: Option<TestParams>,
}

impl Verdict {
    pub(crate) fn exact(property: Property, witness: Option<Witness>) -> Self {
        Verdict {
            property,
            holds: witness.is_none(),
            mode: Mode::Exact,
            witness,
            confidence: None,
        }
    }

    pub(crate) fn statistical(property: Property, witness: Option<Witness>, params: TestParams) -> Self {
        Verdict {
            property,
            holds: witness.is_none(),
            mode: Mode::Statistical,
            witness,
            confidence: Some(params),
        }
    }
}

/// Ordered double sum of pairwise distances, computed pair by pair.
pub(crate) fn pairwise_diversity(members: &[BitString]) -> u64 {
    let mut total = 0;
    for x in members {
        for y in members {
            total += x.distance_unchecked(y) as u64;
        }
    }
    total
}

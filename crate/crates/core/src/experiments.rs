//! Monte Carlo campaigns against the closed-form predictions.
//!
//! Every trial draws from its own stream of the configuration's seed
//! (`ChaCha8` stream = trial index), so results do not depend on the number
//! of threads and adding trials leaves earlier ones unchanged.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitstring::{BitString, Population};
use crate::engine::{self, EngineConfig, Init, TieBreaking};
use crate::error::{usage, Result};
use crate::stats::{bonferroni_z, Moments};
use crate::theory::TheoryParams;

/// Relative part of the Monte Carlo tolerance.
pub const RELATIVE_FLOOR: f64 = 1e-6;

/// Random source for trial `index` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Theory parameters matching a configuration. `eps` only matters for the
/// hitting-time quantities.
pub fn theory_for(config: &EngineConfig, eps: f64) -> Result<TheoryParams> {
    Ok(TheoryParams::new(config.mu, config.n, config.mutation.expected_flips(), eps)?.with_tie_breaking(config.tie_breaking))
}

/// A population where member `i` owns `private[i]` ones that no other member
/// has, so that `S = 2 (mu - 1) sum(private)`.
pub fn staggered_population(n: usize, private: &[usize]) -> Result<Population> {
    let total: usize = private.iter().sum();
    if total > n {
        return usage(format!("{total} private ones do not fit in n = {n}"));
    }
    let mut next = 0;
    let members = private
        .iter()
        .map(|&b| {
            let mut x = BitString::zeros(n);
            for i in next..next + b {
                x.set(i, true);
            }
            next += b;
            x
        })
        .collect();
    Population::new(members)
}

/// A staggered population with diversity as close to `target` as the
/// construction allows.
pub fn population_near(mu: usize, n: usize, target: f64) -> Result<Population> {
    if mu < 2 {
        return usage("need at least two members");
    }
    let total = ((target / (2.0 * (mu - 1) as f64)).round() as usize).min(n);
    let private: Vec<usize> = (0..mu).map(|i| total / mu + usize::from(i < total % mu)).collect();
    staggered_population(n, &private)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftCheckResult {
    pub s_start: u64,
    pub empirical: f64,
    pub predicted: f64,
    pub m: u64,
    pub se: f64,
    pub z: f64,
    pub pass: bool,
}

impl DriftCheckResult {
    pub fn tolerance(&self) -> f64 {
        self.z * self.se + RELATIVE_FLOOR * self.predicted.abs()
    }
}

/// Mean of `S` after one step from `start`, over `m` independent trials.
pub fn one_step_moments(config: &EngineConfig, start: &Population, m: u64) -> Moments {
    let after: Vec<u64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, i);
            let mut pop = start.clone();
            engine::step(config, &mut pop, &mut rng).diversity_after
        })
        .collect();
    after.into_iter().map(|s| s as f64).collect()
}

/// Compares the empirical one-step drift from `start` with the prediction, at 4 sigma.
pub fn drift_check(config: &EngineConfig, start: &Population, m: u64) -> Result<DriftCheckResult> {
    drift_check_at(config, start, m, 4.0)
}

/// As [`drift_check`] with critical value `z`, for Bonferroni-corrected campaigns.
pub fn drift_check_at(config: &EngineConfig, start: &Population, m: u64, z: f64) -> Result<DriftCheckResult> {
    config.validate()?;
    if m < 1000 {
        return usage(format!("drift check needs at least 1000 trials, got {m}"));
    }
    if start.mu() != config.mu || start.n() != config.n {
        return usage("start population does not match the configuration");
    }
    let predicted = theory_for(config, 1.0)?.predicted_drift(start.diversity() as f64);
    let moments = one_step_moments(config, start, m);
    let se = moments.standard_error();
    let empirical = moments.mean();
    let pass = (empirical - predicted).abs() <= z * se + RELATIVE_FLOOR * predicted.abs();
    Ok(DriftCheckResult {
        s_start: start.diversity(),
        empirical,
        predicted,
        m,
        se,
        z,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignEntry {
    pub config: serde_json::Value,
    pub s_start: u64,
    pub predicted: f64,
    pub empirical: f64,
    pub se: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Campaign {
    pub z_critical: f64,
    pub entries: Vec<CampaignEntry>,
    pub pass: bool,
}

/// Drift checks for several `(config, start)` cases, Bonferroni-corrected
/// over the campaign.
pub fn drift_campaign(cases: &[(EngineConfig, Population)], m: u64) -> Result<Campaign> {
    let z = bonferroni_z(cases.len());
    let mut entries = Vec::with_capacity(cases.len());
    for (config, start) in cases {
        let r = drift_check_at(config, start, m, z)?;
        entries.push(CampaignEntry {
            config: serde_json::from_str(&config.fingerprint()).expect("fingerprint is JSON"),
            s_start: r.s_start,
            predicted: r.predicted,
            empirical: r.empirical,
            se: r.se,
            pass: r.pass,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(Campaign { z_critical: z, entries, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub burn_in: u64,
    pub window: u64,
    pub time_average: f64,
    pub s0: f64,
    pub relative_error: f64,
    /// Set when the burn-in is not well above the hitting-time bounds.
    pub warning: Option<String>,
}

/// Time-averaged `S` over `t` in `[burn_in, burn_in + window]` of one run
/// from the configured initial population.
pub fn equilibrium_check(config: &EngineConfig, burn_in: u64, window: u64) -> Result<EquilibriumResult> {
    config.validate()?;
    let theory = theory_for(config, 1.0)?;
    let s0 = theory.equilibrium();
    let bounds = theory.hitting_time_bounds();
    let settle = bounds.down.max(bounds.up);
    let warning = (burn_in as f64) < 10.0 * settle;
    let warning = warning.then(|| {
        let msg = format!("burn-in {burn_in} is less than 10x the hitting-time bound {settle:.1}");
        log::warn!("{msg}");
        msg
    });
    let mut pop = config.initial_population()?;
    let mut rng = config.rng();
    for _ in 0..burn_in {
        engine::step(config, &mut pop, &mut rng);
    }
    let mut sum = pop.diversity() as f64;
    for _ in 0..window {
        sum += engine::step(config, &mut pop, &mut rng).diversity_after as f64;
    }
    let time_average = sum / (window + 1) as f64;
    Ok(EquilibriumResult {
        burn_in,
        window,
        time_average,
        s0,
        relative_error: (time_average - s0).abs() / s0,
        warning,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// From above to `S <= (1 + eps) S0`.
    Down,
    /// From below to `S >= (1 - eps) S0`.
    Up,
}

impl std::str::FromStr for Direction {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "down" => Ok(Direction::Down),
            "up" => Ok(Direction::Up),
            _ => usage(format!("direction must be 'down' or 'up', got '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HittingStatus {
    Pass,
    Fail,
    /// Some trials hit the cap and the rest do not decide the comparison.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HittingTrial {
    /// `None` when the cap was reached.
    pub time: Option<u64>,
    /// Diversity at the first crossing.
    pub landing: Option<u64>,
    pub within_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingTimeResult {
    pub direction: Direction,
    pub eps: f64,
    pub s0: f64,
    pub threshold: f64,
    pub bound: f64,
    pub cap: u64,
    pub start_diversity: u64,
    /// The start already satisfies the stopping condition, so every time is 0.
    pub started_past_threshold: bool,
    pub non_skip: bool,
    pub trials: Vec<HittingTrial>,
    pub capped: usize,
    /// Mean over all trials, capped ones counted at the cap.
    pub mean: f64,
    pub all_within_band: bool,
    pub status: HittingStatus,
}

/// Measures `T_down` or `T_up` over `trials` runs and compares the mean with the bound.
///
/// Down runs start from the max-diversity population and up runs from the
/// all-zeros population, whatever `config.init` says.
pub fn hitting_time_experiment(config: &EngineConfig, eps: f64, direction: Direction, trials: u64) -> Result<HittingTimeResult> {
    config.validate()?;
    if trials == 0 {
        return usage("need at least one trial");
    }
    let theory = theory_for(config, eps)?;
    let s0 = theory.equilibrium();
    let bounds = theory.hitting_time_bounds();
    let (init, bound, threshold) = match direction {
        Direction::Down => (Init::MaxDiversity, bounds.down, (1.0 + eps) * s0),
        Direction::Up => (Init::MonomorphicZero, bounds.up, (1.0 - eps) * s0),
    };
    let config = config.clone().with_init(init);
    let start = config.initial_population()?;
    let cap = (10.0 * bound).ceil() as u64;
    let (lower, upper) = ((1.0 - eps) * s0, (1.0 + eps) * s0);
    let crossed = move |s: u64| match direction {
        Direction::Down => s as f64 <= threshold,
        Direction::Up => s as f64 >= threshold,
    };
    let outcomes: Vec<HittingTrial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, i);
            let mut pop = start.clone();
            match engine::run_until(&config, &mut pop, &mut rng, cap, crossed) {
                Some((t, s)) => HittingTrial {
                    time: Some(t),
                    landing: Some(s),
                    within_band: (lower..=upper).contains(&(s as f64)),
                },
                None => HittingTrial {
                    time: None,
                    landing: None,
                    within_band: false,
                },
            }
        })
        .collect();
    let capped = outcomes.iter().filter(|o| o.time.is_none()).count();
    let mean = outcomes.iter().map(|o| o.time.unwrap_or(cap) as f64).sum::<f64>() / trials as f64;
    let status = if mean > bound {
        HittingStatus::Fail
    } else if capped > 0 {
        HittingStatus::Inconclusive
    } else {
        HittingStatus::Pass
    };
    Ok(HittingTimeResult {
        direction,
        eps,
        s0,
        threshold,
        bound,
        cap,
        start_diversity: start.diversity(),
        started_past_threshold: crossed(start.diversity()),
        non_skip: theory.non_skip_condition(),
        all_within_band: outcomes.iter().all(|o| o.within_band),
        trials: outcomes,
        capped,
        mean,
        status,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TieBreakingComparison {
    pub prefer: DriftCheckResult,
    pub uniform: DriftCheckResult,
    /// `mu / (mu + 1)`.
    pub scale: f64,
    pub s0_prefer: f64,
    pub s0_uniform: f64,
}

impl TieBreakingComparison {
    pub fn pass(&self) -> bool {
        self.prefer.pass && self.uniform.pass && (self.s0_prefer - self.s0_uniform).abs() <= 1e-9 * self.s0_prefer
    }
}

/// Drift checks from `start` under both tie-breaking rules.
pub fn tie_breaking_comparison(config: &EngineConfig, start: &Population, m: u64) -> Result<TieBreakingComparison> {
    let z = bonferroni_z(2);
    let prefer_cfg = config.clone().with_tie_breaking(TieBreaking::PreferOffspring);
    let uniform_cfg = config.clone().with_tie_breaking(TieBreaking::UniformRandom);
    let uniform_theory = theory_for(&uniform_cfg, 1.0)?;
    let s0_uniform = {
        let c = uniform_theory.alpha_delta();
        c.alpha / c.delta
    };
    Ok(TieBreakingComparison {
        prefer: drift_check_at(&prefer_cfg, start, m, z)?,
        uniform: drift_check_at(&uniform_cfg, start, m, z)?,
        scale: uniform_theory.tie_scale(),
        s0_prefer: theory_for(&prefer_cfg, 1.0)?.equilibrium(),
        s0_uniform,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceResult {
    pub a: DriftCheckResult,
    pub b: DriftCheckResult,
    pub difference: f64,
    pub combined_se: f64,
    pub same_prediction: bool,
    pub same_equilibrium: bool,
    pub pass: bool,
}

/// Runs two configurations from the same start and compares their drifts with each other.
pub fn operator_independence(a: &EngineConfig, b: &EngineConfig, start: &Population, m: u64) -> Result<IndependenceResult> {
    let ra = drift_check(a, start, m)?;
    let rb = drift_check(b, start, m)?;
    let difference = (ra.empirical - rb.empirical).abs();
    let combined_se = (ra.se * ra.se + rb.se * rb.se).sqrt();
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(1.0);
    let same_prediction = close(ra.predicted, rb.predicted);
    let same_equilibrium = close(theory_for(a, 1.0)?.equilibrium(), theory_for(b, 1.0)?.equilibrium());
    let pass = difference <= 4.0 * combined_se && same_prediction && same_equilibrium;
    Ok(IndependenceResult {
        a: ra,
        b: rb,
        difference,
        combined_se,
        same_prediction,
        same_equilibrium,
        pass,
    })
}

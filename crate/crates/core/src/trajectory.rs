//! Recorded diversity trajectories and their CSV form.

use std::io::{self, Write};

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowSummary {
    pub from: u64,
    pub to: u64,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
}

/// First passage times of a trajectory; `None` when not observed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingTimes {
    /// First `t` with `S <= (1 + eps) S0`.
    pub down: Option<u64>,
    /// First `t` with `S >= (1 - eps) S0`.
    pub up: Option<u64>,
    /// First `t` with `S` inside `[(1 - eps) S0, (1 + eps) S0]`.
    pub within: Option<u64>,
    /// True when the trajectory ended before all three were observed.
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub fingerprint: String,
    mu: usize,
    n: usize,
    samples: Vec<(u64, u64)>,
    pub summary: Option<WindowSummary>,
    pub hitting_times: Option<HittingTimes>,
}

impl TrajectoryRecord {
    pub fn new(fingerprint: String, mu: usize, n: usize) -> Self {
        TrajectoryRecord {
            fingerprint,
            mu,
            n,
            samples: Vec::new(),
            summary: None,
            hitting_times: None,
        }
    }

    /// Appends a sample.
    ///
    /// Panics if `t` does not increase or `s` exceeds `mu (mu - 1) n`.
    pub fn push(&mut self, t: u64, s: u64) {
        if let Some(&(last, _)) = self.samples.last() {
            assert!(t > last, "sample times must increase: {t} after {last}");
        }
        let bound = (self.mu * self.mu.saturating_sub(1) * self.n) as u64;
        assert!(s <= bound, "diversity {s} above mu(mu-1)n = {bound}");
        self.samples.push((t, s));
    }

    pub fn samples(&self) -> &[(u64, u64)] {
        &self.samples
    }

    pub fn final_diversity(&self) -> Option<u64> {
        self.samples.last().map(|s| s.1)
    }

    /// Mean and variance of the samples with `from <= t <= to`; stores and returns it.
    pub fn summarize(&mut self, from: u64, to: u64) -> Option<&WindowSummary> {
        let values: Vec<f64> = self
            .samples
            .iter()
            .filter(|(t, _)| (from..=to).contains(t))
            .map(|&(_, s)| s as f64)
            .collect();
        if values.is_empty() {
            self.summary = None;
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let variance = if count > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        self.summary = Some(WindowSummary {
            from,
            to,
            count,
            mean,
            variance,
        });
        self.summary.as_ref()
    }

    /// Passage times against the band `[(1 - eps) s0, (1 + eps) s0]`.
    ///
    /// Only meaningful for stride-1 trajectories.
    pub fn compute_hitting_times(&mut self, s0: f64, eps: f64) -> &HittingTimes {
        let upper = (1.0 + eps) * s0;
        let lower = (1.0 - eps) * s0;
        let first = |pred: &dyn Fn(f64) -> bool| self.samples.iter().find(|&&(_, s)| pred(s as f64)).map(|s| s.0);
        let down = first(&|s| s <= upper);
        let up = first(&|s| s >= lower);
        let within = first(&|s| s >= lower && s <= upper);
        let capped = down.is_none() || up.is_none() || within.is_none();
        self.hitting_times.insert(HittingTimes { down, up, within, capped })
    }

    /// Writes `# config: <fingerprint>`, then `t,S` and one row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# config: {}", self.fingerprint)?;
        writeln!(out, "t,S")?;
        for (t, s) in &self.samples {
            writeln!(out, "{t},{s}")?;
        }
        Ok(())
    }
}

//! Command-line front end. The `popdiv` binary is a thin wrapper over [`run`].

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bitstring::{BitString, Population};
use crate::crossover::CrossoverOp;
use crate::engine::{self, EngineConfig, Init, ParentSampling, TieBreaking};
use crate::error::{usage, Error, Result};
use crate::experiments::{self, Direction, HittingStatus};
use crate::mutation::MutationOp;
use crate::oracle::{self, FormulaCheck};
use crate::rational::Rate;

pub const EXIT_OK: i32 = 0;
/// A result contradicts the theory or the documented classification.
pub const EXIT_CONTRADICTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "popdiv", version, about = "Population diversity of steady-state EAs on flat fitness")]
struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, env = "POPDIV_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form drift, equilibrium and hitting-time bounds.
    Predict {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "1/2")]
        eps: Rate,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Runs the algorithm and writes the diversity trajectory.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Empirical one-step drift against the prediction.
    DriftCheck {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// zero | max | near | random | explicit:<x1>,<x2>,...
        #[arg(long, default_value = "zero")]
        start: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Time-averaged diversity after a burn-in, against S0.
    Equilibrium {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 100_000)]
        burn_in: u64,
        #[arg(long, default_value_t = 1_000_000)]
        window: u64,
        /// Largest accepted relative error.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mean first passage time into the band around S0, against the bound.
    HittingTime {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "1/2")]
        eps: Rate,
        #[arg(long, value_enum, default_value_t = DirectionArg::Down)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certifies the crossover catalogue.
    Classify {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact enumerated drift against the formula for every small population.
    OracleDrift {
        /// Omit to run mu = 2..=3.
        #[arg(long)]
        mu: Option<usize>,
        /// Omit to run n = 1..=4.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "kflip:k=1")]
        mutation: String,
        #[arg(long)]
        crossover: Option<String>,
        #[arg(long)]
        pc: Option<Rate>,
        #[arg(long, value_enum, default_value_t = TieArg::Prefer)]
        tie: TieArg,
        #[arg(long, value_enum, default_value_t = ParentsArg::With)]
        parents: ParentsArg,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct ConfigArgs {
    #[arg(long)]
    mu: usize,
    #[arg(long)]
    n: usize,
    /// sbm:p=<rate> | kflip:k=<int> | heavy:tau=<rate>; `x/n` rates are accepted.
    #[arg(long, default_value = "kflip:k=1")]
    mutation: String,
    /// Crossover spec; omit for the mutation-only EA.
    #[arg(long)]
    crossover: Option<String>,
    /// Crossover probability, 1 when omitted.
    #[arg(long)]
    pc: Option<Rate>,
    #[arg(long, value_enum, default_value_t = TieArg::Prefer)]
    tie: TieArg,
    #[arg(long, value_enum, default_value_t = ParentsArg::With)]
    parents: ParentsArg,
    /// zero | max | random | explicit:<x1>,<x2>,...
    #[arg(long, default_value = "zero")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the main output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TieArg {
    Prefer,
    Uniform,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ParentsArg {
    With,
    Without,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DirectionArg {
    Down,
    Up,
}

impl From<TieArg> for TieBreaking {
    fn from(t: TieArg) -> Self {
        match t {
            TieArg::Prefer => TieBreaking::PreferOffspring,
            TieArg::Uniform => TieBreaking::UniformRandom,
        }
    }
}

impl From<ParentsArg> for ParentSampling {
    fn from(p: ParentsArg) -> Self {
        match p {
            ParentsArg::With => ParentSampling::WithReplacement,
            ParentsArg::Without => ParentSampling::WithoutReplacement,
        }
    }
}

fn parse_members(list: &str) -> Result<Vec<BitString>> {
    list.split(',').map(|s| s.trim().parse()).collect()
}

fn parse_init(spec: &str) -> Result<Init> {
    match spec {
        "zero" => Ok(Init::MonomorphicZero),
        "max" => Ok(Init::MaxDiversity),
        "random" => Ok(Init::UniformRandom),
        _ => match spec.strip_prefix("explicit:") {
            Some(list) => Ok(Init::Explicit(parse_members(list)?)),
            None => usage(format!("unknown init '{spec}'")),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn build_config(
    mu: usize,
    n: usize,
    mutation: &str,
    crossover: Option<&str>,
    pc: Option<Rate>,
    tie: TieArg,
    parents: ParentsArg,
    seed: u64,
) -> Result<EngineConfig> {
    let mutation = MutationOp::parse(mutation, n)?;
    let config = match crossover {
        Some(spec) => EngineConfig::ga(mu, n, mutation, CrossoverOp::parse(spec)?, pc.unwrap_or_else(Rate::one)),
        None => {
            if pc.is_some() {
                return usage("--pc needs --crossover");
            }
            EngineConfig::ea(mu, n, mutation)
        }
    };
    let config = config
        .with_tie_breaking(tie.into())
        .with_parent_sampling(parents.into())
        .with_seed(seed);
    config.validate()?;
    Ok(config)
}

impl ConfigArgs {
    fn build(&self) -> Result<EngineConfig> {
        let config = build_config(
            self.mu,
            self.n,
            &self.mutation,
            self.crossover.as_deref(),
            self.pc,
            self.tie,
            self.parents,
            self.seed,
        )?
        .with_init(parse_init(&self.init)?);
        config.validate()?;
        Ok(config)
    }
}

/// Where the main output goes, plus standard output for summaries.
struct Sink<'a> {
    stdout: &'a mut (dyn Write + Send),
    file: Option<BufWriter<File>>,
}

impl Sink<'_> {
    fn main(&mut self) -> &mut dyn Write {
        match &mut self.file {
            Some(f) => f,
            None => self.stdout,
        }
    }

    fn to_file(&self) -> bool {
        self.file.is_some()
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out).map_err(io_error)
}

fn io_error(e: io::Error) -> Error {
    Error::Usage(format!("i/o error: {e}"))
}

/// Parses `argv` (including the program name) and runs the command.
///
/// Returns the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, stdout, stderr)),
            Err(e) => Err(Error::Usage(format!("cannot start {j} threads: {e}"))),
        },
        None => dispatch(cli.command, stdout, stderr),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn open(output: &OutputArgs) -> Result<Option<BufWriter<File>>> {
    output
        .out
        .as_ref()
        .map(|p| File::create(p).map(BufWriter::new).map_err(|e| Error::Usage(format!("cannot create {}: {e}", p.display()))))
        .transpose()
}

fn dispatch(command: Command, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<i32> {
    match command {
        Command::Predict { config, eps, output } => {
            let cfg = config.build()?;
            let mut sink = Sink { stdout, file: open(&output)? };
            let prediction = experiments::theory_for(&cfg, eps.to_f64())?.predict();
            match output.format.unwrap_or(Format::Text) {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        config: serde_json::Value,
                        chi: f64,
                        #[serde(flatten)]
                        prediction: &'a crate::theory::Prediction,
                    }
                    let out = Out {
                        config: serde_json::from_str(&cfg.fingerprint()).expect("fingerprint is JSON"),
                        chi: cfg.mutation.expected_flips(),
                        prediction: &prediction,
                    };
                    write_json(sink.main(), &out)?;
                }
                _ => {
                    let w = sink.main();
                    let p = &prediction;
                    (|| -> io::Result<()> {
                        writeln!(w, "# config: {}", cfg.fingerprint())?;
                        writeln!(w, "mu = {}, n = {}, chi = {}", cfg.mu, cfg.n, p.params.chi)?;
                        writeln!(w, "alpha = {}", p.alpha)?;
                        writeln!(w, "delta = {}", p.delta)?;
                        writeln!(w, "S0 = {:.10}", p.s0)?;
                        writeln!(w, "down_bound (eps = {}) = {:.6}", eps, p.down_bound)?;
                        writeln!(w, "up_bound (eps = {}) = {:.6}", eps, p.up_bound)?;
                        writeln!(w, "non_skip = {}", p.non_skip)
                    })()
                    .map_err(io_error)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Simulate { config, steps, stride, output } => {
            let cfg = config.build()?;
            let mut sink = Sink { stdout, file: open(&output)? };
            let record = engine::run(&cfg, steps, stride)?;
            match output.format.unwrap_or(Format::Csv) {
                Format::Json => write_json(sink.main(), &record)?,
                Format::Text | Format::Csv => record.write_csv(sink.main()).map_err(io_error)?,
            }
            Ok(EXIT_OK)
        }
        Command::DriftCheck { config, trials, start, output } => {
            let cfg = config.build()?;
            let start = start_population(&cfg, &start)?;
            let campaign = experiments::drift_campaign(&[(cfg, start)], trials)?;
            let mut sink = Sink { stdout, file: open(&output)? };
            let text = output.format == Some(Format::Text);
            if !text {
                write_json(sink.main(), &campaign)?;
            }
            if text || sink.to_file() {
                for e in &campaign.entries {
                    writeln!(
                        sink.stdout,
                        "S_start = {}: empirical {:.6} predicted {:.6} se {:.6} [{}]",
                        e.s_start,
                        e.empirical,
                        e.predicted,
                        e.se,
                        pass_word(e.pass)
                    )
                    .map_err(io_error)?;
                }
            }
            Ok(if campaign.pass { EXIT_OK } else { EXIT_CONTRADICTION })
        }
        Command::Equilibrium {
            config,
            burn_in,
            window,
            tolerance,
            output,
        } => {
            let cfg = config.build()?;
            let r = experiments::equilibrium_check(&cfg, burn_in, window)?;
            let pass = r.relative_error <= tolerance;
            let mut sink = Sink { stdout, file: open(&output)? };
            let text = output.format == Some(Format::Text);
            if !text {
                #[derive(Serialize)]
                struct Out<'a> {
                    config: serde_json::Value,
                    predicted: f64,
                    empirical: f64,
                    tolerance: f64,
                    pass: bool,
                    detail: &'a experiments::EquilibriumResult,
                }
                let out = Out {
                    config: serde_json::from_str(&cfg.fingerprint()).expect("fingerprint is JSON"),
                    predicted: r.s0,
                    empirical: r.time_average,
                    tolerance,
                    pass,
                    detail: &r,
                };
                write_json(sink.main(), &out)?;
            }
            if text || sink.to_file() {
                writeln!(
                    sink.stdout,
                    "time-averaged S = {:.4}, S0 = {:.4}, relative error {:.4} [{}]",
                    r.time_average,
                    r.s0,
                    r.relative_error,
                    pass_word(pass)
                )
                .map_err(io_error)?;
            }
            Ok(if pass { EXIT_OK } else { EXIT_CONTRADICTION })
        }
        Command::HittingTime {
            config,
            eps,
            direction,
            trials,
            output,
        } => {
            let cfg = config.build()?;
            let direction = match direction {
                DirectionArg::Down => Direction::Down,
                DirectionArg::Up => Direction::Up,
            };
            let wanted = match direction {
                Direction::Down => Init::MaxDiversity,
                Direction::Up => Init::MonomorphicZero,
            };
            if cfg.init != wanted {
                let _ = writeln!(stderr, "note: {direction:?} runs start from {wanted:?}; --init ignored");
            }
            let r = experiments::hitting_time_experiment(&cfg, eps.to_f64(), direction, trials)?;
            let mut sink = Sink { stdout, file: open(&output)? };
            let text = output.format == Some(Format::Text);
            if !text {
                #[derive(Serialize)]
                struct Out<'a> {
                    config: serde_json::Value,
                    predicted: f64,
                    empirical: f64,
                    pass: bool,
                    detail: &'a experiments::HittingTimeResult,
                }
                let out = Out {
                    config: serde_json::from_str(&cfg.fingerprint()).expect("fingerprint is JSON"),
                    predicted: r.bound,
                    empirical: r.mean,
                    pass: r.status == HittingStatus::Pass,
                    detail: &r,
                };
                write_json(sink.main(), &out)?;
            }
            if text || sink.to_file() {
                writeln!(
                    sink.stdout,
                    "{:?}: mean {:.2} vs bound {:.2}, {} of {} capped, landing in band: {} [{:?}]",
                    r.direction,
                    r.mean,
                    r.bound,
                    r.capped,
                    r.trials.len(),
                    r.all_within_band,
                    r.status
                )
                .map_err(io_error)?;
            }
            Ok(match r.status {
                HittingStatus::Fail => EXIT_CONTRADICTION,
                _ => EXIT_OK,
            })
        }
        Command::Classify { n, output } => {
            let report = oracle::classification_report(n)?;
            let mut sink = Sink { stdout, file: open(&output)? };
            match output.format.unwrap_or(Format::Text) {
                Format::Json => write_json(sink.main(), &report)?,
                _ => sink.main().write_all(report.render_text().as_bytes()).map_err(io_error)?,
            }
            Ok(if report.consistent() { EXIT_OK } else { EXIT_CONTRADICTION })
        }
        Command::OracleDrift {
            mu,
            n,
            mutation,
            crossover,
            pc,
            tie,
            parents,
            output,
        } => {
            let mus: Vec<usize> = mu.map_or_else(|| vec![2, 3], |m| vec![m]);
            let ns: Vec<usize> = n.map_or_else(|| (1..=4).collect(), |n| vec![n]);
            let mut checks = Vec::new();
            for &mu in &mus {
                for &n in &ns {
                    let cfg = build_config(mu, n, &mutation, crossover.as_deref(), pc, tie, parents, 0)?;
                    checks.push(FormulaCheck::run(&cfg)?);
                }
            }
            let pass = checks.iter().all(FormulaCheck::passed);
            let mut sink = Sink { stdout, file: open(&output)? };
            match output.format.unwrap_or(Format::Text) {
                Format::Json => write_json(sink.main(), &checks)?,
                _ => {
                    let w = sink.main();
                    for c in &checks {
                        writeln!(
                            w,
                            "mu = {}, n = {}, chi = {}: {} populations, {} mismatches [{}]",
                            c.mu,
                            c.n,
                            c.chi,
                            c.populations,
                            c.mismatches.len(),
                            pass_word(c.passed())
                        )
                        .map_err(io_error)?;
                        if let Some(m) = c.mismatches.first() {
                            writeln!(w, "  first: {:?} S = {}: exact {} vs formula {}", m.members, m.diversity, m.exact, m.predicted)
                                .map_err(io_error)?;
                        }
                    }
                }
            }
            Ok(if pass { EXIT_OK } else { EXIT_CONTRADICTION })
        }
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn start_population(cfg: &EngineConfig, spec: &str) -> Result<Population> {
    match spec {
        "zero" => Population::monomorphic(cfg.mu, cfg.n),
        "max" => Population::max_diversity(cfg.mu, cfg.n),
        "near" => experiments::population_near(cfg.mu, cfg.n, experiments::theory_for(cfg, 1.0)?.equilibrium()),
        "random" => cfg.clone().with_init(Init::UniformRandom).initial_population(),
        _ => match spec.strip_prefix("explicit:") {
            Some(list) => Population::new(parse_members(list)?),
            None => usage(format!("unknown start '{spec}'")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("popdiv").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn predict_prints_equilibrium() {
        let (code, out, _) = run_str(&["predict", "--mu", "2", "--n", "10", "--mutation", "kflip:k=1"]);
        assert_eq!(code, 0);
        assert!(out.contains("S0 = 3.3333333333"), "{out}");
    }

    #[test]
    fn zero_step_simulation() {
        let (code, out, _) = run_str(&["simulate", "--mu", "2", "--n", "8", "--mutation", "kflip:k=1", "--steps", "0", "--seed", "1"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, ["t,S", "0,0"]);
    }

    #[test]
    fn bad_flags_exit_two() {
        assert_eq!(run_str(&["predict", "--mu", "2"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["predict", "--mu", "2", "--n", "4", "--mutation", "kflip:k=9"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["simulate", "--mu", "2", "--n", "4", "--pc", "1/2"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
    }

    #[test]
    fn oracle_drift_detects_non_neutral_crossover() {
        let (code, _, _) = run_str(&["oracle-drift", "--mu", "2", "--n", "3"]);
        assert_eq!(code, 0);
        let (code, out, _) = run_str(&["oracle-drift", "--mu", "3", "--n", "3", "--crossover", "or"]);
        assert_eq!(code, EXIT_CONTRADICTION, "{out}");
    }
}

//! Reproducible report generation for the `qubit-nosig` binary.
//!
//! Each subcommand is a pure function of [`RunConfig`]: the same
//! configuration (including the worker count) produces byte-identical
//! output. JSON numbers are written by `serde_json`, CSV numbers by `f64`'s
//! `Display`; both emit the shortest decimal that parses back to the same value.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::estimator::{density_experiment, EstimatorStrategy, GuessingForm, TabulatedDensity};
use crate::merit::{monte_carlo_fidelity, optimize_over, scan_csv, MeritFunction, TabulatedMerit};
use crate::nosignal::{fit_ab_least_squares, run_discrimination_experiment, AbFit, DiscriminationReport, Verdict};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qubit-nosig", version, about = "Qubit state estimation under the no-signaling constraint")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Monte Carlo average fidelity of a strategy.
    Fidelity,
    /// θ-histogram of guesses against the analytic density (CSV).
    Density,
    /// Cap-count discrimination test over the p-list (JSON).
    Nosignal,
    /// Least-squares recovery of (A, B) from a sampled histogram (JSON).
    Fit,
    /// Average merit across the normalized AB family (CSV).
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    /// Random-axis projective measurement.
    MassarPopescu,
    /// AB-form sampler with A = A-frac/2π, B = (1 − A-frac)/2π.
    Ab,
    /// Guess uniformly, ignoring the input.
    Uniform,
    /// AB-form sampler with A = 0, B = 1/2π.
    Reversed,
    /// Tabulated (3/4π) cos⁴(θ/2), a non-AB counterexample.
    Cos4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeritName {
    /// cos²(θ/2).
    Fidelity,
    /// cos⁴(θ/2), tabulated.
    SquaredFidelity,
    /// 1 − θ/π, tabulated.
    Linear,
    /// ½ everywhere.
    Constant,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, global = true, default_value_t = 50)]
    pub bins: usize,
    /// Comma-separated list of p-values for `nosignal`.
    #[arg(long = "p", global = true, value_delimiter = ',', default_value = "0.5,0.6,0.7,0.8,0.9")]
    pub p: Vec<f64>,
    /// Cap half-angle in radians for `nosignal`.
    #[arg(long, global = true, default_value_t = 0.2)]
    pub cap: f64,
    #[arg(long, global = true, value_enum, default_value_t = StrategyName::MassarPopescu)]
    pub strategy: StrategyName,
    /// Fraction of the normalized mass on A for `--strategy ab`.
    #[arg(long = "A-frac", global = true, default_value_t = 1.0)]
    pub a_frac: f64,
    #[arg(long, global = true, value_enum, default_value_t = MeritName::Fidelity)]
    pub merit: MeritName,
    /// Number of A-values in `scan`.
    #[arg(long, global = true, default_value_t = 1001)]
    pub points: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 4)]
    pub workers: usize,
}

/// Everything a report depends on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: u64,
    pub bins: usize,
    pub p: Vec<f64>,
    pub cap: f64,
    pub strategy: StrategyName,
    pub a_frac: f64,
    pub merit: MeritName,
    pub points: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub workers: usize,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        let a = cli.args;
        Self {
            command: cli.command,
            seed: a.seed,
            trials: a.trials,
            bins: a.bins,
            p: a.p,
            cap: a.cap,
            strategy: a.strategy,
            a_frac: a.a_frac,
            merit: a.merit,
            points: a.points,
            out: a.out,
            workers: a.workers,
        }
    }

    /// Parses command-line words (without the program name).
    pub fn parse_from<I, T>(words: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let argv = std::iter::once(std::ffi::OsString::from("qubit-nosig")).chain(words.into_iter().map(Into::into));
        Cli::try_parse_from(argv).map(Self::from_cli)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials < 1 {
            return bad("--trials must be at least 1".into());
        }
        if self.bins < 2 {
            return bad("--bins must be at least 2".into());
        }
        if self.p.is_empty() {
            return bad("--p needs at least one value".into());
        }
        if let Some(p) = self.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("--p value {p} outside [0, 1]"));
        }
        if !(self.cap > 0.0 && self.cap <= PI) {
            return bad(format!("--cap {} outside (0, π]", self.cap));
        }
        if !(0.0..=1.0).contains(&self.a_frac) {
            return bad(format!("--A-frac {} outside [0, 1]", self.a_frac));
        }
        if self.points < 2 {
            return bad("--points must be at least 2".into());
        }
        if self.workers < 1 {
            return bad("--workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn strategy(&self) -> Result<EstimatorStrategy> {
        Ok(match self.strategy {
            StrategyName::MassarPopescu => EstimatorStrategy::MassarPopescu,
            StrategyName::Ab => EstimatorStrategy::ab(GuessingForm::from_a_fraction(self.a_frac)?)?,
            StrategyName::Uniform => EstimatorStrategy::ab(GuessingForm::uniform())?,
            StrategyName::Reversed => EstimatorStrategy::ab(GuessingForm::massar_popescu().swapped())?,
            StrategyName::Cos4 => EstimatorStrategy::Tabulated(TabulatedDensity::cos4_counterexample()),
        })
    }

    pub fn merit(&self) -> Result<MeritFunction> {
        Ok(match self.merit {
            MeritName::Fidelity => MeritFunction::Fidelity,
            MeritName::SquaredFidelity => {
                MeritFunction::MonotoneTabulated(TabulatedMerit::from_fn(|t| (0.5 * t).cos().powi(4), 1801)?)
            }
            MeritName::Linear => MeritFunction::MonotoneTabulated(TabulatedMerit::from_fn(|t| 1.0 - t / PI, 2)?),
            MeritName::Constant => MeritFunction::MonotoneTabulated(TabulatedMerit::constant(0.5)?),
        })
    }
}

/// Process exit code for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidProbability(_) | Error::InvalidForm(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

#[derive(Debug, Serialize)]
struct FidelityOutput {
    command: &'static str,
    strategy: StrategyName,
    seed: u64,
    trials: u64,
    workers: usize,
    mean: f64,
    standard_error: f64,
}

#[derive(Debug, Serialize)]
struct VerdictCounts {
    not_detectable: usize,
    indeterminate: usize,
    detectable: usize,
}

#[derive(Debug, Serialize)]
struct NosignalOutput {
    command: &'static str,
    strategy: StrategyName,
    workers: usize,
    reports: Vec<DiscriminationReport>,
    verdicts: VerdictCounts,
}

#[derive(Debug, Serialize)]
struct FitOutput {
    command: &'static str,
    strategy: StrategyName,
    seed: u64,
    trials: u64,
    bins: usize,
    workers: usize,
    #[serde(flatten)]
    fit: AbFit,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Runs the average-fidelity experiment.
pub fn cmd_fidelity(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let strategy = config.strategy()?;
    let report = monte_carlo_fidelity(&strategy, config.trials, config.seed, config.workers)?;
    Ok(json(&FidelityOutput {
        command: "fidelity",
        strategy: config.strategy,
        seed: config.seed,
        trials: config.trials,
        workers: config.workers,
        mean: report.value,
        standard_error: report.standard_error.unwrap_or(0.0),
    }))
}

/// θ-histogram CSV plus a `#` χ² summary line.
pub fn cmd_density(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let strategy = config.strategy()?;
    let hist = density_experiment(&strategy, config.trials, config.bins, config.seed, config.workers)?;
    let band = |lo: f64, hi: f64| strategy.band_probability(lo, hi);
    let chi = hist.chi_square(band);
    let mut out = hist.to_csv(band);
    out.push_str(&format!(
        "# chi2={} dof={} critical_0.999={} pass={}\n",
        chi.statistic,
        chi.dof,
        chi.critical,
        chi.passes()
    ));
    Ok(out)
}

/// One discrimination report per p, with verdict totals.
pub fn cmd_nosignal(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let strategy = config.strategy()?;
    let reports = config
        .p
        .iter()
        .map(|&p| run_discrimination_experiment(&strategy, p, config.cap, config.trials, config.seed, config.workers))
        .collect::<Result<Vec<_>>>()?;
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let verdicts = VerdictCounts {
        not_detectable: count(Verdict::NotDetectable),
        indeterminate: count(Verdict::Indeterminate),
        detectable: count(Verdict::Detectable),
    };
    Ok(json(&NosignalOutput { command: "nosignal", strategy: config.strategy, workers: config.workers, reports, verdicts }))
}

/// Samples a histogram and fits α + β cos θ.
pub fn cmd_fit(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let strategy = config.strategy()?;
    let hist = density_experiment(&strategy, config.trials, config.bins, config.seed, config.workers)?;
    let fit = fit_ab_least_squares(&hist)?;
    Ok(json(&FitOutput {
        command: "fit",
        strategy: config.strategy,
        seed: config.seed,
        trials: config.trials,
        bins: config.bins,
        workers: config.workers,
        fit,
    }))
}

/// Merit across the normalized family; the trailing `#` line marks the argmax.
pub fn cmd_scan(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let optimum = optimize_over(&config.merit()?, config.points)?;
    Ok(scan_csv(&optimum))
}

pub fn run(config: &RunConfig) -> Result<String> {
    match config.command {
        Command::Fidelity => cmd_fidelity(config),
        Command::Density => cmd_density(config),
        Command::Nosignal => cmd_nosignal(config),
        Command::Fit => cmd_fit(config),
        Command::Scan => cmd_scan(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(words: &[&str]) -> RunConfig {
        RunConfig::parse_from(words.iter().copied()).unwrap()
    }

    #[test]
    fn defaults() {
        let c = cfg(&["fidelity"]);
        assert_eq!(c.trials, 1_000_000);
        assert_eq!(c.bins, 50);
        assert_eq!(c.cap, 0.2);
        assert_eq!(c.p, vec![0.5, 0.6, 0.7, 0.8, 0.9]);
        assert_eq!(c.strategy, StrategyName::MassarPopescu);
        c.validate().unwrap();
    }

    #[test]
    fn flags_parse() {
        let c = cfg(&["nosignal", "--strategy", "cos4", "--p", "0.9,0.7", "--cap", "0.3", "--A-frac", "0.25", "--workers", "2"]);
        assert_eq!(c.command, Command::Nosignal);
        assert_eq!(c.strategy, StrategyName::Cos4);
        assert_eq!(c.p, vec![0.9, 0.7]);
        assert_eq!(c.a_frac, 0.25);
        assert_eq!(c.workers, 2);
        assert!(RunConfig::parse_from(["bogus"]).is_err());
        assert!(RunConfig::parse_from(["fit", "--strategy", "nope"]).is_err());
    }

    #[test]
    fn validation_maps_to_usage_errors() {
        for words in [
            &["fidelity", "--trials", "0"][..],
            &["density", "--bins", "1"],
            &["nosignal", "--p", "1.5"],
            &["nosignal", "--cap", "0"],
            &["fidelity", "--strategy", "ab", "--A-frac", "2"],
            &["fidelity", "--workers", "0"],
        ] {
            let err = run(&cfg(words)).unwrap_err();
            assert_eq!(exit_code(&err), EXIT_USAGE, "{words:?}");
        }
        assert_eq!(exit_code(&Error::Unfittable("x".into())), EXIT_RUNTIME);
    }

    #[test]
    fn fit_on_tiny_histogram_is_a_runtime_error() {
        let err = run(&cfg(&["fit", "--trials", "1"])).unwrap_err();
        assert!(matches!(err, Error::Unfittable(_)));
        assert_eq!(exit_code(&err), EXIT_RUNTIME);
    }

    #[test]
    fn fidelity_json_shape() {
        let out = run(&cfg(&["fidelity", "--trials", "1000", "--seed", "1"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["strategy"], "massar-popescu");
        assert_eq!(v["trials"], 1000);
        assert!(v["mean"].as_f64().unwrap() > 0.5);
    }

    #[test]
    fn scan_tie_and_argmax() {
        let out = run(&cfg(&["scan", "--merit", "constant", "--points", "11"])).unwrap();
        assert!(out.lines().last().unwrap().starts_with("# tie"));
        let out = run(&cfg(&["scan", "--merit", "linear", "--points", "11"])).unwrap();
        let last = out.lines().last().unwrap();
        assert!(last.starts_with(&format!("# argmax A={} B=0 ", 1.0 / (2.0 * PI))), "{last}");
    }
}

//! Command-line arguments.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tailstat_core::osd::{MAX_MOMENT_ORDER, NU_GUARD};

#[derive(Debug, Parser)]
#[command(
    name = "tailstat",
    version,
    about = "Tail-weighted goodness-of-fit statistics and GPD threshold selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Master seed for every random stream.
    #[arg(long, global = true, env = "TAILSTAT_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for simulations and bootstraps (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate goodness-of-fit statistics on a data file.
    Gof(GofArgs),
    /// Closed-form risk of the statistic family.
    #[command(alias = "risk-curve")]
    Risk(RiskArgs),
    /// Monte Carlo estimate of the risk under the uniform null.
    Simulate(SimulateArgs),
    /// The order-statistic discrete distribution on {1, …, n}.
    Osd(OsdArgs),
    /// Automated GPD threshold selection.
    SelectThreshold(SelectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Uniform,
    Exp,
    Normal,
    Gpd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatKind {
    Cvm,
    Ad,
    Lower,
    Upper,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("transform").required(true).args(["pit", "model"])))]
pub struct GofArgs {
    /// Data file, one value per line (`-` for standard input).
    pub input: PathBuf,

    /// The data are already probability-integral transformed.
    #[arg(long)]
    pub pit: bool,

    /// Model CDF for the transform.
    #[arg(long, value_enum)]
    pub model: Option<Model>,

    /// Uniform lower bound.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub lo: f64,
    /// Uniform upper bound.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub hi: f64,
    /// Exponential rate.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sd: f64,
    /// GPD shape.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub shape: f64,
    /// GPD scale.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// GPD threshold (location).
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub threshold: f64,

    /// Statistics to evaluate (comma separated).
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [StatKind::Cvm, StatKind::Ad])]
    pub stat: Vec<StatKind>,

    /// Lower-tail stress, decimal or fraction.
    #[arg(long, default_value = "1")]
    pub a: String,
    /// Upper-tail stress, decimal or fraction.
    #[arg(long, default_value = "1")]
    pub b: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Named {
    Cvm,
    Ad,
    Al,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["a", "grid", "named"])))]
pub struct RiskArgs {
    /// A single stress value.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<String>,
    /// Stress grid `start:stop:step`, expanded exactly.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// A named classical statistic.
    #[arg(long, value_enum)]
    pub named: Option<Named>,
    /// Which tail the stress applies to (the formula is the same).
    #[arg(long, value_enum, default_value_t = Side::Lower)]
    pub side: Side,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Statistic; defaults to `upper` when only `--b` is given, else `lower`.
    #[arg(long, value_enum)]
    pub stat: Option<StatKind>,
    /// Lower-tail stress.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<String>,
    /// Upper-tail stress.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<String>,
    /// Sample size per trial.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
    pub trials: u64,
    /// Nested trial counts for a stress-2 divergence probe, e.g. 1000,10000.
    #[arg(long, value_delimiter = ',')]
    pub probe: Option<Vec<usize>>,
}

fn parse_nu(s: &str) -> Result<f64, String> {
    let nu: f64 = s.parse().map_err(|_| format!("invalid number {s:?}"))?;
    if !nu.is_finite() || nu < -1.0 + NU_GUARD {
        return Err(format!("nu must be finite and > -1, got {s}"));
    }
    Ok(nu)
}

fn parse_order(s: &str) -> Result<u32, String> {
    let k: u32 = s
        .parse()
        .map_err(|_| format!("invalid moment order {s:?}"))?;
    if k > MAX_MOMENT_ORDER {
        return Err(format!("moment order must be at most {MAX_MOMENT_ORDER}"));
    }
    Ok(k)
}

#[derive(Debug, Args)]
pub struct OsdArgs {
    /// Support size.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Shape parameter ν > −1.
    #[arg(long, allow_negative_numbers = true, value_parser = parse_nu)]
    pub nu: f64,
    /// Emit raw moments of order 0..=K.
    #[arg(long, value_parser = parse_order)]
    pub moments: Option<u32>,
    /// Emit the pmf/CDF table.
    #[arg(long)]
    pub table: bool,
    /// Draw this many values.
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSide {
    /// Weight the large excesses (upper tail of the PIT sample).
    High,
    /// Weight the small excesses just above the threshold.
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    ForwardStop,
    StrongStop,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("cands").required(true).args(["grid", "candidates"])))]
pub struct SelectArgs {
    /// Data file, one value per line (`-` for standard input).
    pub input: PathBuf,
    /// Candidate thresholds `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Explicit ascending candidate thresholds.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub candidates: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Bootstrap replicates per candidate.
    #[arg(long, default_value_t = 199)]
    pub reps: usize,
    /// Stress of the tail statistic.
    #[arg(long, default_value = "1")]
    pub stat_a: String,
    #[arg(long, value_enum, default_value_t = WeightSide::High)]
    pub weight_side: WeightSide,
    #[arg(long, value_enum, default_value_t = Rule::ForwardStop)]
    pub rule: Rule,
    /// Minimum number of excesses for a candidate to be fitted.
    #[arg(long, default_value_t = 30)]
    pub min_count: usize,
}

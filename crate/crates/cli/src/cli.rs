//! Argument definitions. Every range check lives in a value parser so that
//! bad input is a usage error before anything touches the filesystem.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tikhreg::params::{PriorRule, StopMode};

#[derive(Parser, Debug)]
#[command(name = "tikhreg", version, about = "Weighted Tikhonov regularization experiments")]
pub struct Cli {
    /// Worker threads for Monte Carlo realizations.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=1024))]
    pub threads: u16,

    /// Flat key=value file supplying flags not given on the command line.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Build a test problem and store it as a .prob file.
    Generate(GenerateArgs),
    /// Generalized eigenvalues and decay-exponent fit.
    Spectrum(SpectrumArgs),
    /// One regularized solve for one noise draw.
    Solve(SolveArgs),
    /// Output error over a log grid of λ against the rule's prediction.
    Sweep(SweepArgs),
    /// Adaptive parameter iteration with its full trace.
    Adaptive(AdaptiveArgs),
    /// Monte Carlo convergence-rate estimate.
    Montecarlo(MonteCarloArgs),
    /// Distribution of the output error over many noise draws.
    Study(StudyArgs),
    /// Adaptive rule over a grid of noise levels and sizes.
    Table(TableArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Spectrum(_) => "spectrum",
            Command::Solve(_) => "solve",
            Command::Sweep(_) => "sweep",
            Command::Adaptive(_) => "adaptive",
            Command::Montecarlo(_) => "montecarlo",
            Command::Study(_) => "study",
            Command::Table(_) => "table",
        }
    }

    pub fn out_dir(&self) -> Option<&PathBuf> {
        match self {
            Command::Generate(a) => a.out.out_dir.as_ref(),
            Command::Spectrum(a) => a.out.out_dir.as_ref(),
            Command::Solve(a) => a.out.out_dir.as_ref(),
            Command::Sweep(a) => a.out.out_dir.as_ref(),
            Command::Adaptive(a) => a.out.out_dir.as_ref(),
            Command::Montecarlo(a) => a.out.out_dir.as_ref(),
            Command::Study(a) => a.out.out_dir.as_ref(),
            Command::Table(a) => a.out.out_dir.as_ref(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Fredholm,
    Blur,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Rho0,
    W,
}

impl From<RuleArg> for PriorRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Rho0 => PriorRule::Rho0,
            RuleArg::W => PriorRule::W,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StopArg {
    Absolute,
    Relative,
}

impl From<StopArg> for StopMode {
    fn from(s: StopArg) -> Self {
        match s {
            StopArg::Absolute => StopMode::Absolute,
            StopArg::Relative => StopMode::Relative,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Spectral,
    Direct,
}

#[derive(Args, Debug, Serialize)]
pub struct OutArgs {
    /// Output directory [default: $TIKHREG_OUT/<command> or tikhreg-out/<command>].
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ProblemArgs {
    #[arg(long, value_enum, default_value_t = ProblemKind::Fredholm)]
    pub problem: ProblemKind,
    /// Fredholm discretization size.
    #[arg(long, default_value_t = 2000, value_parser = size_in(2, 20_000))]
    pub n: usize,
    /// Blur image side (n = side²).
    #[arg(long, default_value_t = 40, value_parser = size_in(4, 200))]
    pub side: usize,
    /// Blur point-spread standard deviation in pixels.
    #[arg(long, default_value_t = 2.0, value_parser = positive, allow_negative_numbers = true)]
    pub psf_width: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SourceArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Read the problem from a .prob file instead of generating it.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["problem", "n", "side", "psf_width"])]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct NoiseArgs {
    /// Relative noise level δ.
    #[arg(long, default_value_t = 0.01, value_parser = nonnegative, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct RuleArgs {
    #[arg(long, value_enum, default_value_t = RuleArg::Rho0)]
    pub rule: RuleArg,
    /// Spectral decay exponent assumed by the rule.
    #[arg(long, default_value_t = 4.0, value_parser = exponent, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Rule constant C.
    #[arg(long = "c", default_value_t = 1.0, value_parser = positive, allow_negative_numbers = true)]
    pub constant_c: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct IterationArgs {
    #[arg(long, default_value_t = 4.0, value_parser = exponent, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long = "c", default_value_t = 1.0, value_parser = positive, allow_negative_numbers = true)]
    pub constant_c: f64,
    #[arg(long, default_value_t = 1e-10, value_parser = positive, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = StopArg::Absolute)]
    pub stop: StopArg,
    #[arg(long, default_value_t = 100, value_parser = size_in(1, 1_000_000))]
    pub max_iters: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = ProblemKind::Fredholm)]
    pub problem: ProblemKind,
    /// Fredholm sizes (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = size_in(2, 20_000))]
    pub ns: Vec<usize>,
    /// Blur sides (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = size_in(4, 200))]
    pub sides: Vec<usize>,
    #[arg(long, default_value_t = 2.0, value_parser = positive, allow_negative_numbers = true)]
    pub psf_width: f64,
    /// Noise levels (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = positive, allow_negative_numbers = true)]
    pub deltas: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    /// Fixed λ; the a-priori rule is used when absent.
    #[arg(long, value_parser = positive, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = SolverArg::Spectral)]
    pub solver: SolverArg,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, default_value_t = 1e-10, value_parser = positive, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1e-4, value_parser = positive, allow_negative_numbers = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 10, value_parser = size_in(2, 100_000))]
    pub count: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct AdaptiveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub iteration: IterationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, default_value_t = 200, value_parser = size_in(2, 10_000_000))]
    pub reps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct StudyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    /// Fixed λ; the a-priori rule is used when absent.
    #[arg(long, value_parser = positive, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 2000, value_parser = size_in(100, 10_000_000))]
    pub reps: usize,
    #[arg(long, default_value_t = tikhreg::harness::DEFAULT_BINS, value_parser = size_in(1, 100_000))]
    pub bins: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub iteration: IterationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is out of range (0, ∞)"))
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is out of range [0, ∞)"))
    }
}

fn exponent(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v > 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is out of range (1, ∞)"))
    }
}

fn size_in(lo: usize, hi: usize) -> impl Fn(&str) -> Result<usize, String> + Clone + Send + Sync + 'static {
    move |s: &str| {
        let v: usize = s.trim().parse().map_err(|_| format!("`{s}` is not a whole number"))?;
        if (lo..=hi).contains(&v) {
            Ok(v)
        } else {
            Err(format!("{v} is out of range [{lo}, {hi}]"))
        }
    }
}

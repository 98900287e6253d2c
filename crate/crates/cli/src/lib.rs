//! The `mixed-milnor` command line.
//!
//! Every subcommand writes one JSON report with its run manifest embedded
//! under the `manifest` key. Exit codes: `0` success, `1` a checked property
//! failed, `2` bad input or usage, `3` internal or numerical failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod commands;
pub mod input;
pub mod report;

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "MIXED_MILNOR_THREADS";

#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "input error: {e:#}"),
            CliError::Internal(e) => write!(f, "internal error: {e:#}"),
        }
    }
}

impl From<mixed_milnor::Error> for CliError {
    fn from(e: mixed_milnor::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.into())
        } else {
            CliError::Internal(e.into())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mixed-milnor", version, about = "Numerical checks for mixed Brieskorn-type polynomials")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Property tolerance; each subcommand documents its default.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Omit timestamps so that reruns are byte-identical.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub canonical: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weights and simpliciality of a family's mixed endpoint or a polynomial.
    Analyze(AnalyzeArgs),
    /// Diagonal scaling that turns every coefficient into 1 (default tolerance 1e-10).
    Normalize(NormalizeArgs),
    /// Search for mixed singular points on spheres or tube walls (default tolerance 1e-3).
    CertifySmooth(CertifyArgs),
    /// Rank tests and radial witnesses at sampled link points (default tolerance 1e-8).
    CheckTransversality(TransversalityArgs),
    /// Rank-test margins for loop families, reported as evidence only (default tolerance 1e-8).
    ExploreConjecture(ConjectureArgs),
    /// Transport link points or tube fibers along the deformation (default tolerance 1e-6).
    BuildIsotopy(IsotopyArgs),
    /// Sample a two-variable link, count its components, and render it.
    TraceLink(TraceArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Family or polynomial spec (JSON).
    pub spec: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NormalizeArgs {
    /// Family or polynomial spec (JSON).
    pub spec: PathBuf,
    /// Random points used to verify the scaling.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value = "0:1:0.1")]
    pub t_grid: String,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Search the tube wall `|f_t| = eta0` inside the ball instead of the sphere.
    #[arg(long)]
    pub level_eta0: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Rank,
    Witness,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransversalityArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value = "0:1:0.1")]
    pub t_grid: String,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Link points per grid value.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    /// Radius at which chain witnesses trace their recursion.
    #[arg(long, default_value_t = 2.0)]
    pub eval_radius: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConjectureArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value = "0:1:0.1")]
    pub t_grid: String,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Link points per grid value.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IsotopyArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// Starting points (JSON list of points, each a list of [re, im]).
    #[arg(long, conflicts_with = "sample_link")]
    pub points: Option<PathBuf>,
    /// Sample this many starting points instead of reading them.
    #[arg(long)]
    pub sample_link: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Tube level; chosen by a margin scan when absent.
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Report only endpoints and residuals.
    #[arg(long)]
    pub endpoints_only: bool,
    /// Transport the tube fiber `f_0 = eta0·e^{iθ}` instead of link points.
    #[arg(long)]
    pub fiber: bool,
    /// Fiber angle θ.
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TraceArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Seed grid size per slice axis.
    #[arg(long, default_value_t = 64)]
    pub seeds: usize,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Normalize(_) => "normalize",
            Command::CertifySmooth(_) => "certify-smooth",
            Command::CheckTransversality(_) => "check-transversality",
            Command::ExploreConjecture(_) => "explore-conjecture",
            Command::BuildIsotopy(_) => "build-isotopy",
            Command::TraceLink(_) => "trace-link",
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Internal(e.into()))
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| commands::execute(&cli)));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mixed-milnor: {e}");
            e.exit_code()
        }
    }
}

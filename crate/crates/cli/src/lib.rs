//! Batch front end for `quasifold-core`: reads atlases and bi-atlases as JSON,
//! runs the checks, and prints schema-versioned reports.
//!
//! Exit codes: 0 every check passed, 1 a check failed, 2 usage or parse
//! error, 3 nothing failed but something was inconclusive.

pub mod commands;
pub mod config;
pub mod inputs;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use thiserror::Error;

pub use config::Config;
pub use report::{Check, Format, Report, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("{0}")]
    Module(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Module(m) if m.starts_with("inconclusive") => 3,
            CliError::Module(_) | CliError::Internal(_) => 1,
        }
    }
}

macro_rules! module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Module(e.to_string())
            }
        }
    )*};
}

module_error!(
    quasifold_core::numbers::NumberError,
    quasifold_core::groupoid::GroupoidError,
    quasifold_core::atlas::AtlasError,
    quasifold_core::algebra::AlgebraError,
    quasifold_core::mrw::MrwError,
    quasifold_core::lifting::LiftError
);

/// Parses JSON, reporting the path of the failing field plus line and column.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse { path: origin.to_string(), detail: format!("field `{path}`: {inner}") }
    })
}

#[derive(Debug, Parser)]
#[command(name = "quasifold", version, about = "Structure groupoids, convolution algebras and lifts of quasifolds")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Each can also be set through a
/// `QUASIFOLD_*` environment variable; flags win over the environment, and
/// both win over the config file.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON config file.
    #[arg(long, global = true, env = "QUASIFOLD_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "QUASIFOLD_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, env = "QUASIFOLD_FORMAT")]
    pub format: Option<Format>,
    /// Group enumeration and fiber search bound.
    #[arg(long, global = true, env = "QUASIFOLD_BOUND")]
    pub bound: Option<u32>,
    /// Main tolerance of the command.
    #[arg(long, global = true, env = "QUASIFOLD_TOL")]
    pub tol: Option<f64>,
    /// Decimal value of α, or `default`.
    #[arg(long, global = true, env = "QUASIFOLD_ALPHA")]
    pub alpha: Option<String>,
    /// Add wall-clock timing to the report (breaks byte-identical output).
    #[arg(long, global = true, env = "QUASIFOLD_TIMING")]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Isotropy and assembly report of an atlas at a point.
    Groupoid(commands::GroupoidArgs),
    /// Convolution *-algebra checks.
    #[command(subcommand)]
    Algebra(commands::AlgebraCommand),
    /// Rotation relation V*U = λ U*V and the functor to the circle groupoid.
    Rotation(commands::RotationArgs),
    /// Matrix representation M(z) of elements supported in U_p.
    Repr(commands::ReprArgs),
    /// The ℝ/ℚ algebra: axioms and the matrix representations for several p.
    RqAlgebra(commands::RqArgs),
    /// Equivalence bimodule axioms of a bi-atlas.
    Morita(commands::MoritaArgs),
    /// Affine-piece detection, affine fits, prescribed lifts, the flip demo.
    #[command(subcommand)]
    Lift(commands::LiftCommand),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Groupoid(_) => "groupoid",
            Command::Algebra(_) => "algebra",
            Command::Rotation(_) => "rotation",
            Command::Repr(_) => "repr",
            Command::RqAlgebra(_) => "rq-algebra",
            Command::Morita(_) => "morita",
            Command::Lift(_) => "lift",
        }
    }
}

/// Defaults, then the config file, then environment and flags.
pub fn resolve_config(g: &GlobalArgs) -> Result<Config, CliError> {
    let mut cfg = match &g.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(f) = g.format {
        cfg.format = f;
    }
    if let Some(b) = g.bound {
        cfg.bounds.group = b;
        cfg.bounds.fiber = b;
    }
    if let Some(a) = &g.alpha {
        cfg.alpha.value = a.clone();
    }
    cfg.tol_override = g.tol;
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a parsed command line and returns the rendered report and exit code.
pub fn execute(cli: &Cli, echo: String) -> Result<(String, i32), CliError> {
    let cfg = resolve_config(&cli.global)?;
    let start = Instant::now();
    let config = serde_json::to_value(&cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut report = Report::new(echo, config);
    match &cli.command {
        Command::Groupoid(a) => commands::groupoid(a, &cfg, &mut report)?,
        Command::Algebra(a) => commands::algebra(a, &cfg, &mut report)?,
        Command::Rotation(a) => commands::rotation(a, &cfg, &mut report)?,
        Command::Repr(a) => commands::repr(a, &cfg, &mut report)?,
        Command::RqAlgebra(a) => commands::rq_algebra(a, &cfg, &mut report)?,
        Command::Morita(a) => commands::morita(a, &cfg, &mut report)?,
        Command::Lift(a) => commands::lift(a, &cfg, &mut report)?,
    }
    report.finish();
    if cli.global.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok((report.render(cfg.format)?, report.status.exit_code()))
}

/// Full pipeline from raw arguments: `(stdout, stderr, exit code)`.
pub fn run<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return if code == 0 { (e.to_string(), String::new(), 0) } else { (String::new(), e.to_string(), code) };
        }
    };
    let echo = std::iter::once(cli.command.name().to_string())
        .chain(args.iter().skip(2).map(|a| a.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join(" ");
    match execute(&cli, echo) {
        Ok((out, code)) => (out, String::new(), code),
        Err(e) => (String::new(), format!("error: {e}\n"), e.exit_code()),
    }
}

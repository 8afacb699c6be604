//! Layered run configuration: command-line flags override `OPCOST_`
//! environment variables, which override the JSON config file, which
//! overrides built-in defaults.

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand};
use opcost_core::cost::{builtin_profile, builtin_profiles, MetricKind, PerMetric, Profile};
use opcost_core::report::CohortScope;
use opcost_core::validate::{DEFAULT_EU_RANGE, DEFAULT_GRID_STEPS, DEFAULT_PRICE_RANGE};
use serde::Deserialize;

use crate::AppError;

pub const DEFAULT_ARCH: &str = "x86_64";
pub const DEFAULT_PROFILE: &str = "RESEARCH";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CONFIG_FILE: &str = "opcost.json";
pub const ENV_PREFIX: &str = "OPCOST_";

pub const DEFAULT_SWEEP_RANGE: (f64, f64) = (0.1, 0.7);
pub const DEFAULT_SWEEP_STEPS: usize = 121;

#[derive(Parser, Debug)]
#[command(
    name = "opcost",
    version,
    about = "Operation-level cost and efficiency analyzer",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Score the functions of one source file.
    Analyze(AnalyzeArgs),
    /// Discover, parse, and score every source file under a root.
    Batch(BatchArgs),
    /// Run the seeded simulation study comparing MODEL with B1/B2/B3.
    Validate(ValidateArgs),
    /// Sweep one profile weight and report where two artifacts swap rank.
    Sweep(SweepArgs),
    /// Rescore a cohort over an energy-scale by price-scale grid.
    Grid(GridArgs),
}

impl CliCommand {
    #[must_use]
    pub fn common(&self) -> &CommonArgs {
        match self {
            CliCommand::Analyze(a) => &a.common,
            CliCommand::Batch(a) => &a.common,
            CliCommand::Validate(a) => &a.common,
            CliCommand::Sweep(a) => &a.common,
            CliCommand::Grid(a) => &a.common,
        }
    }
}

/// Flags shared by every subcommand. All are optional so absence can fall
/// through to the environment, config file, and defaults.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Cost table architecture
    #[arg(long)]
    pub arch: Option<String>,
    /// Built-in profile name (RESEARCH, COMMERCIAL, MOBILE, HPC)
    #[arg(long)]
    pub profile: Option<String>,
    /// Explicit metric weights as cu,eu,co2,usd
    #[arg(long, value_name = "A,B,C,D")]
    pub weights: Option<String>,
    /// Cost table file overriding the bundled tables
    #[arg(long, value_name = "PATH")]
    pub cost_table: Option<String>,
    /// Output format: text or json
    #[arg(long)]
    pub format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub output: Option<String>,
    /// Seed for the simulation commands
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cohort granularity: functions or files
    #[arg(long)]
    pub cohort: Option<String>,
    /// Only analyze paths matching these globs
    #[arg(long, value_name = "GLOB")]
    pub include: Vec<String>,
    /// Skip paths matching these globs
    #[arg(long, value_name = "GLOB")]
    pub exclude: Vec<String>,
    /// Maximum parser worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Config file (default: ./opcost.json when present)
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Source file to analyze
    pub input: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    /// Root directory (or single file) to discover sources under
    pub root: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the study's accuracy table as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Source file or directory supplying the cohort
    pub input: String,
    /// Artifact id whose score is tracked as A
    pub artifact_a: String,
    /// Artifact id whose score is tracked as B
    pub artifact_b: String,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Metric whose weight is swept: cu, eu, co2, or usd
    #[arg(long)]
    pub metric: Option<String>,
    /// Swept weight range as lo,hi
    #[arg(long, value_name = "LO,HI")]
    pub range: Option<String>,
    /// Number of sweep grid points
    #[arg(long)]
    pub steps: Option<usize>,
    /// Also write the sweep curve as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<String>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Source file or directory supplying the cohort
    pub input: String,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Energy scale range as lo,hi
    #[arg(long, value_name = "LO,HI")]
    pub eu_range: Option<String>,
    /// Price scale range as lo,hi
    #[arg(long, value_name = "LO,HI")]
    pub price_range: Option<String>,
    /// Grid resolution as ROWSxCOLS
    #[arg(long, value_name = "RxC")]
    pub grid: Option<String>,
    /// Also write the grid cells as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Batch,
    Validate,
    Sweep,
    Grid,
}

impl Command {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Batch => "batch",
            Command::Validate => "validate",
            Command::Sweep => "sweep",
            Command::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    fn parse(value: &str) -> Result<Format, AppError> {
        match value {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(AppError::usage(format!(
                "unknown format {other:?}; expected \"text\" or \"json\""
            ))),
        }
    }
}

/// How the run's profile was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileChoice {
    Named(String),
    Weights([f64; 4]),
}

impl ProfileChoice {
    /// Materializes the scoring profile, validating names against the
    /// built-in set and explicit weights against the simplex constraint.
    pub fn resolve(&self) -> Result<Profile, AppError> {
        match self {
            ProfileChoice::Named(name) => builtin_profile(name).ok_or_else(|| {
                let known: Vec<String> = builtin_profiles()
                    .iter()
                    .map(|p| p.name().to_owned())
                    .collect();
                AppError::usage(format!(
                    "unknown profile {name:?}; built-in profiles are {}",
                    known.join(", ")
                ))
            }),
            ProfileChoice::Weights(w) => Profile::new("CUSTOM", PerMetric(*w))
                .map_err(|e| AppError::usage(format!("invalid --weights: {e}"))),
        }
    }
}

/// Rule and band threshold overrides from the config file.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverrides {
    pub div_cu_share: Option<f64>,
    pub mem_eu_share: Option<f64>,
    pub branch_count_share: Option<f64>,
    pub simd_min_arith: Option<u64>,
    pub grades: Option<BTreeMap<String, f64>>,
    pub ratings: Option<BTreeMap<String, f64>>,
}

impl ThresholdOverrides {
    pub fn is_empty(&self) -> bool {
        *self == ThresholdOverrides::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub metric: MetricKind,
    pub range: (f64, f64),
    pub steps: usize,
}

impl Default for SweepOptions {
    fn default() -> SweepOptions {
        SweepOptions {
            metric: MetricKind::Cu,
            range: DEFAULT_SWEEP_RANGE,
            steps: DEFAULT_SWEEP_STEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub eu_range: (f64, f64),
    pub price_range: (f64, f64),
    pub eu_steps: usize,
    pub price_steps: usize,
}

impl Default for GridOptions {
    fn default() -> GridOptions {
        GridOptions {
            eu_range: DEFAULT_EU_RANGE,
            price_range: DEFAULT_PRICE_RANGE,
            eu_steps: DEFAULT_GRID_STEPS,
            price_steps: DEFAULT_GRID_STEPS,
        }
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<String>,
    pub architecture: String,
    pub profile: ProfileChoice,
    pub cost_table_path: Option<String>,
    pub format: Format,
    pub output_path: Option<String>,
    pub seed: u64,
    /// None defers to the per-command default: functions for a single
    /// file, files for a directory.
    pub cohort_scope: Option<CohortScope>,
    pub threshold_overrides: ThresholdOverrides,
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    pub jobs: Option<usize>,
    pub csv_path: Option<String>,
    /// Two artifact ids compared by `sweep`.
    pub sweep_artifacts: Option<(String, String)>,
    pub sweep: SweepOptions,
    pub grid: GridOptions,
}

/// One precedence level's settings.
#[derive(Debug, Clone, Default, PartialEq)]
struct Layer {
    arch: Option<String>,
    profile: Option<String>,
    weights: Option<[f64; 4]>,
    cost_table: Option<String>,
    format: Option<Format>,
    output: Option<String>,
    seed: Option<u64>,
    cohort: Option<CohortScope>,
    include: Option<Vec<String>>,
    exclude: Option<Vec<String>>,
    jobs: Option<usize>,
    csv: Option<String>,
    thresholds: Option<ThresholdOverrides>,
}

fn parse_weights(text: &str, origin: &str) -> Result<[f64; 4], AppError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(AppError::usage(format!(
            "{origin} needs four comma-separated weights (cu,eu,co2,usd), got {text:?}"
        )));
    }
    let mut weights = [0.0; 4];
    for (slot, part) in weights.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| AppError::usage(format!("{origin}: {part:?} is not a number")))?;
    }
    Ok(weights)
}

fn parse_pair(text: &str, origin: &str) -> Result<(f64, f64), AppError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(AppError::usage(format!(
            "{origin} needs lo,hi, got {text:?}"
        )));
    }
    let lo = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|_| AppError::usage(format!("{origin}: {:?} is not a number", parts[0])))?;
    let hi = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| AppError::usage(format!("{origin}: {:?} is not a number", parts[1])))?;
    Ok((lo, hi))
}

fn parse_cohort(text: &str, origin: &str) -> Result<CohortScope, AppError> {
    CohortScope::from_name(text).ok_or_else(|| {
        AppError::usage(format!(
            "{origin}: unknown cohort {text:?}; expected \"functions\" or \"files\""
        ))
    })
}

fn parse_metric(text: &str, origin: &str) -> Result<MetricKind, AppError> {
    MetricKind::from_name(text).ok_or_else(|| {
        AppError::usage(format!(
            "{origin}: unknown metric {text:?}; expected cu, eu, co2, or usd"
        ))
    })
}

fn parse_jobs(value: usize, origin: &str) -> Result<usize, AppError> {
    if value == 0 {
        return Err(AppError::usage(format!("{origin} must be at least 1")));
    }
    Ok(value)
}

impl Layer {
    fn from_flags(common: &CommonArgs) -> Result<Layer, AppError> {
        Ok(Layer {
            arch: common.arch.clone(),
            profile: common.profile.clone(),
            weights: common
                .weights
                .as_deref()
                .map(|w| parse_weights(w, "--weights"))
                .transpose()?,
            cost_table: common.cost_table.clone(),
            format: common.format.as_deref().map(Format::parse).transpose()?,
            output: common.output.clone(),
            seed: common.seed,
            cohort: common
                .cohort
                .as_deref()
                .map(|c| parse_cohort(c, "--cohort"))
                .transpose()?,
            include: if common.include.is_empty() {
                None
            } else {
                Some(common.include.clone())
            },
            exclude: if common.exclude.is_empty() {
                None
            } else {
                Some(common.exclude.clone())
            },
            jobs: common.jobs.map(|j| parse_jobs(j, "--jobs")).transpose()?,
            csv: None,
            thresholds: None,
        })
    }

    fn from_env(env: &BTreeMap<String, String>) -> Result<Layer, AppError> {
        let get = |key: &str| env.get(&format!("{ENV_PREFIX}{key}")).map(String::as_str);
        let list = |key: &str| {
            get(key).map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
        };
        Ok(Layer {
            arch: get("ARCH").map(String::from),
            profile: get("PROFILE").map(String::from),
            weights: get("WEIGHTS")
                .map(|w| parse_weights(w, "OPCOST_WEIGHTS"))
                .transpose()?,
            cost_table: get("COST_TABLE").map(String::from),
            format: get("FORMAT").map(Format::parse).transpose()?,
            output: get("OUTPUT").map(String::from),
            seed: get("SEED")
                .map(|s| {
                    s.parse::<u64>().map_err(|_| {
                        AppError::usage(format!("OPCOST_SEED: {s:?} is not an unsigned integer"))
                    })
                })
                .transpose()?,
            cohort: get("COHORT")
                .map(|c| parse_cohort(c, "OPCOST_COHORT"))
                .transpose()?,
            include: list("INCLUDE"),
            exclude: list("EXCLUDE"),
            jobs: get("JOBS")
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| {
                            AppError::usage(format!(
                                "OPCOST_JOBS: {s:?} is not an unsigned integer"
                            ))
                        })
                        .and_then(|j| parse_jobs(j, "OPCOST_JOBS"))
                })
                .transpose()?,
            csv: get("CSV").map(String::from),
            thresholds: None,
        })
    }

    fn from_document(doc: &str) -> Result<Layer, AppError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Document {
            arch: Option<String>,
            profile: Option<String>,
            weights: Option<[f64; 4]>,
            cost_table: Option<String>,
            format: Option<String>,
            output: Option<String>,
            seed: Option<u64>,
            cohort: Option<String>,
            include: Option<Vec<String>>,
            exclude: Option<Vec<String>>,
            jobs: Option<usize>,
            csv: Option<String>,
            thresholds: Option<ThresholdOverrides>,
        }
        let doc: Document =
            serde_json::from_str(doc).map_err(|e| AppError::usage(format!("config file: {e}")))?;
        Ok(Layer {
            arch: doc.arch,
            profile: doc.profile,
            weights: doc.weights,
            cost_table: doc.cost_table,
            format: doc.format.as_deref().map(Format::parse).transpose()?,
            output: doc.output,
            seed: doc.seed,
            cohort: doc
                .cohort
                .as_deref()
                .map(|c| parse_cohort(c, "config file"))
                .transpose()?,
            include: doc.include,
            exclude: doc.exclude,
            jobs: doc
                .jobs
                .map(|j| parse_jobs(j, "config file jobs"))
                .transpose()?,
            csv: doc.csv,
            thresholds: doc.thresholds,
        })
    }
}

/// Merges precedence layers (highest first) into a resolved profile
/// choice. A layer naming both a profile and explicit weights is
/// contradictory; across layers the higher one wins outright.
fn resolve_profile(layers: &[Layer]) -> Result<ProfileChoice, AppError> {
    for layer in layers {
        match (&layer.profile, &layer.weights) {
            (Some(_), Some(_)) => {
                return Err(AppError::usage(
                    "--profile and --weights are contradictory; give one or the other",
                ));
            }
            (Some(name), None) => return Ok(ProfileChoice::Named(name.clone())),
            (None, Some(w)) => return Ok(ProfileChoice::Weights(*w)),
            (None, None) => {}
        }
    }
    Ok(ProfileChoice::Named(DEFAULT_PROFILE.to_owned()))
}

fn first<T: Clone>(layers: &[Layer], pick: impl Fn(&Layer) -> &Option<T>) -> Option<T> {
    layers.iter().find_map(|layer| pick(layer).clone())
}

/// Resolves an already-parsed command line against the environment and
/// the optional config document.
pub fn resolve_config(
    cli: &Cli,
    env: &BTreeMap<String, String>,
    config_doc: Option<&str>,
) -> Result<RunConfig, AppError> {
    let (command, inputs, common) = match &cli.command {
        CliCommand::Analyze(a) => (Command::Analyze, vec![a.input.clone()], &a.common),
        CliCommand::Batch(a) => (Command::Batch, vec![a.root.clone()], &a.common),
        CliCommand::Validate(a) => (Command::Validate, Vec::new(), &a.common),
        CliCommand::Sweep(a) => (Command::Sweep, vec![a.input.clone()], &a.common),
        CliCommand::Grid(a) => (Command::Grid, vec![a.input.clone()], &a.common),
    };

    let mut layers = vec![Layer::from_flags(common)?, Layer::from_env(env)?];
    if let Some(doc) = config_doc {
        layers.push(Layer::from_document(doc)?);
    }

    let profile = resolve_profile(&layers)?;
    if let ProfileChoice::Weights(w) = &profile {
        Profile::new("CUSTOM", PerMetric(*w))
            .map_err(|e| AppError::usage(format!("invalid weights: {e}")))?;
    }

    let mut config = RunConfig {
        command,
        inputs,
        architecture: first(&layers, |l| &l.arch).unwrap_or_else(|| DEFAULT_ARCH.to_owned()),
        profile,
        cost_table_path: first(&layers, |l| &l.cost_table),
        format: first(&layers, |l| &l.format).unwrap_or(Format::Text),
        output_path: first(&layers, |l| &l.output),
        seed: first(&layers, |l| &l.seed).unwrap_or(DEFAULT_SEED),
        cohort_scope: first(&layers, |l| &l.cohort),
        threshold_overrides: first(&layers, |l| &l.thresholds).unwrap_or_default(),
        include: first(&layers, |l| &l.include).unwrap_or_default(),
        exclude: first(&layers, |l| &l.exclude).unwrap_or_default(),
        jobs: first(&layers, |l| &l.jobs),
        csv_path: first(&layers, |l| &l.csv),
        sweep_artifacts: None,
        sweep: SweepOptions::default(),
        grid: GridOptions::default(),
    };

    match &cli.command {
        CliCommand::Sweep(a) => {
            config.sweep_artifacts = Some((a.artifact_a.clone(), a.artifact_b.clone()));
            if let Some(m) = &a.metric {
                config.sweep.metric = parse_metric(m, "--metric")?;
            }
            if let Some(r) = &a.range {
                config.sweep.range = parse_pair(r, "--range")?;
            }
            if let Some(s) = a.steps {
                if s < 2 {
                    return Err(AppError::usage("--steps must be at least 2"));
                }
                config.sweep.steps = s;
            }
            if let Some(csv) = &a.csv {
                config.csv_path = Some(csv.clone());
            }
        }
        CliCommand::Grid(a) => {
            if let Some(r) = &a.eu_range {
                config.grid.eu_range = parse_pair(r, "--eu-range")?;
            }
            if let Some(r) = &a.price_range {
                config.grid.price_range = parse_pair(r, "--price-range")?;
            }
            if let Some(g) = &a.grid {
                let parts: Vec<&str> = g.split(['x', 'X']).collect();
                let dims: Option<(usize, usize)> = match parts.as_slice() {
                    [r, c] => r.trim().parse().ok().zip(c.trim().parse().ok()),
                    _ => None,
                };
                let (rows, cols) = dims.ok_or_else(|| {
                    AppError::usage(format!(
                        "--grid needs ROWSxCOLS (for example 5x5), got {g:?}"
                    ))
                })?;
                if rows == 0 || cols == 0 {
                    return Err(AppError::usage(
                        "--grid needs at least one row and one column",
                    ));
                }
                config.grid.eu_steps = rows;
                config.grid.price_steps = cols;
            }
            if let Some(csv) = &a.csv {
                config.csv_path = Some(csv.clone());
            }
        }
        CliCommand::Validate(a) => {
            if let Some(csv) = &a.csv {
                config.csv_path = Some(csv.clone());
            }
        }
        _ => {}
    }

    Ok(config)
}

/// Parses a raw token list and resolves it into a run configuration.
/// Help and version requests surface as usage errors here; the binary
/// entry point intercepts them before calling this.
pub fn load_run_config<I, S>(
    args: I,
    env: &BTreeMap<String, String>,
    config_doc: Option<&str>,
) -> Result<RunConfig, AppError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let tokens: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&tokens).map_err(|e| AppError::usage(e.to_string()))?;
    resolve_config(&cli, env, config_doc)
}

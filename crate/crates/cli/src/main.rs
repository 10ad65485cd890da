//! qtel — qudit teleportation fidelity under noise.
//!
//! Subcommands: fidelity (one scenario), sweep (noise-fraction grids to
//! CSV/JSONL), optimize (measurement phases), validate (invariant suites),
//! scatter (entanglement vs quantum contribution), thresholds.
//!
//! Exit codes: 0 success, 1 validation failure or I/O error, 2 invalid
//! arguments, 3 dimension cap exceeded.

mod commands;
mod output;
mod spec_parse;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qudit_teleport::{Dim, Error as CoreError};

use commands::{FidelityArgs, Method, SweepArgs};
use output::Format;
use spec_parse::Config;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or spec strings → exit 2.
    Usage(String),
    /// Requested dimension above a cap → exit 3.
    DimensionCap(String),
    /// Check failures → exit 1.
    Failure(String),
    /// I/O problems → exit 1.
    Io(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::OracleDimensionCap { .. } => CliError::DimensionCap(e.to_string()),
            CoreError::DimensionOutOfRange { d, max, .. } if d > max => {
                CliError::DimensionCap(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::DimensionCap(_) => 3,
            CliError::Failure(_) | CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::DimensionCap(m)
            | CliError::Failure(m)
            | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qtel",
    version,
    about = "Average fidelity of noisy qudit teleportation: exact simulation, Monte Carlo and closed forms"
)]
struct Cli {
    /// Plain key=value file supplying defaults for omitted flags
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads (default: $QTEL_WORKERS, then all cores); affects wall
    /// time only, never results
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Qudit dimension d ≥ 2
    #[arg(long)]
    d: Option<usize>,

    /// Noise per qudit: `I|A|B=KIND:p` with KIND ∈ {F,P,FP,D,AD}; omitted
    /// qudits are noiseless; `none` for the noiseless scenario. For sweeps a
    /// fraction may be a range `start:stop:steps`.
    #[arg(long, num_args = 1.., value_name = "SPEC")]
    noise: Vec<String>,

    /// Channel state: max | rank:ν | boundary:μ:a | file:PATH
    #[arg(long)]
    gamma: Option<String>,

    /// Measurement basis: max | phased:φ1,φ2,… | file:PATH
    #[arg(long)]
    basis: Option<String>,

    /// closed | oracle-mc | both
    #[arg(long)]
    method: Option<String>,

    /// Monte Carlo sample count (oracle-mc/both)
    #[arg(long)]
    n_samples: Option<usize>,

    /// Base RNG seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity of a single noise scenario
    Fidelity(ScenarioArgs),
    /// Grid sweep over noise fractions, written to a file
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv | jsonl
        #[arg(long)]
        format: Option<String>,
    },
    /// Optimal measurement phases under single-qudit phase-flip noise
    Optimize {
        #[arg(long)]
        d: Option<usize>,
        /// Phase-flip fraction
        #[arg(long)]
        p: Option<f64>,
    },
    /// Run the invariant suites
    Validate {
        /// fast | full
        #[arg(long, default_value = "fast")]
        level: String,
    },
    /// Entanglement scatter plus boundary-family curves
    Scatter {
        #[arg(long)]
        d: Option<usize>,
        /// Number of random channel states
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Samples per boundary curve
        #[arg(long)]
        curve_points: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv | jsonl
        #[arg(long)]
        format: Option<String>,
    },
    /// Critical noise fractions for every kind at one dimension
    Thresholds {
        #[arg(long)]
        d: Option<usize>,
    },
}

/// flag > config > fallback.
fn resolve<T: Clone + std::str::FromStr>(
    flag: Option<T>,
    config: &Config,
    key: &str,
    fallback: T,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match config.get(key) {
        Some(s) => s
            .parse::<T>()
            .map_err(|_| CliError::Usage(format!("config key '{key}' has invalid value '{s}'"))),
        None => Ok(fallback),
    }
}

fn resolve_required<T: Clone + std::str::FromStr>(
    flag: Option<T>,
    config: &Config,
    key: &str,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match config.get(key) {
        Some(s) => s
            .parse::<T>()
            .map_err(|_| CliError::Usage(format!("config key '{key}' has invalid value '{s}'"))),
        None => Err(CliError::Usage(format!(
            "missing --{} (no flag and no config value)",
            key.replace('_', "-")
        ))),
    }
}

fn init_workers(flag: Option<usize>, config: &Config) -> Result<(), CliError> {
    let from_env = std::env::var("QTEL_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    let workers = match (flag, config.get_parsed::<usize>("workers")?, from_env) {
        (Some(w), _, _) => Some(w),
        (None, Some(w), _) => Some(w),
        (None, None, w) => w,
    };
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {w} workers: {e}")))?;
    }
    Ok(())
}

struct ResolvedScenario {
    d: Dim,
    noise: spec_parse::NoiseAssignment,
    gamma: qudit_teleport::SchmidtChannel,
    basis: qudit_teleport::MeasurementBasis,
    gamma_label: String,
    basis_label: String,
    method: Method,
    n_samples: usize,
    seed: u64,
}

fn scenario_inputs(args: &ScenarioArgs, config: &Config) -> Result<ResolvedScenario, CliError> {
    let d_raw: usize = resolve_required(args.d, config, "d")?;
    let d = Dim::new(d_raw).map_err(CliError::from)?;
    let noise_tokens: Vec<String> = if args.noise.is_empty() {
        match config.get("noise") {
            Some(s) => s.split_whitespace().map(str::to_string).collect(),
            None => vec!["none".to_string()],
        }
    } else {
        args.noise.clone()
    };
    let noise = spec_parse::parse_noise(&noise_tokens)?;
    let gamma_label = resolve(args.gamma.clone(), config, "gamma", "max".to_string())?;
    let basis_label = resolve(args.basis.clone(), config, "basis", "max".to_string())?;
    let gamma = spec_parse::parse_gamma(&gamma_label, d)?;
    let basis = spec_parse::parse_basis(&basis_label, d)?;
    let method: Method = {
        let s = resolve(args.method.clone(), config, "method", "closed".to_string())?;
        s.parse().map_err(CliError::Usage)?
    };
    let n_samples = resolve(args.n_samples, config, "n_samples", 10_000)?;
    let seed = resolve(args.seed, config, "seed", 0)?;
    Ok(ResolvedScenario {
        d,
        noise,
        gamma,
        basis,
        gamma_label,
        basis_label,
        method,
        n_samples,
        seed,
    })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let config = Config::load(cli.config.as_deref())?;
    init_workers(cli.workers, &config)?;

    match cli.command {
        Command::Fidelity(args) => {
            let r = scenario_inputs(&args, &config)?;
            // the Monte Carlo oracle works on the 3-register state
            if r.method != Method::Closed {
                qudit_teleport::Dim::with_max(r.d.get(), qudit_teleport::oracle::DIM_CAP)
                    .map_err(|_| {
                        CliError::DimensionCap(format!(
                            "d = {} exceeds the 3-qudit simulation cap {}",
                            r.d,
                            qudit_teleport::oracle::DIM_CAP
                        ))
                    })?;
            }
            commands::cmd_fidelity(&FidelityArgs {
                d: r.d,
                noise: &r.noise,
                gamma: &r.gamma,
                basis: &r.basis,
                gamma_label: r.gamma_label,
                basis_label: r.basis_label,
                method: r.method,
                n_samples: r.n_samples,
                seed: r.seed,
            })?;
            Ok(0)
        }
        Command::Sweep {
            scenario,
            out,
            format,
        } => {
            let r = scenario_inputs(&scenario, &config)?;
            let out = match (out, config.get("out")) {
                (Some(p), _) => p,
                (None, Some(s)) => PathBuf::from(s),
                (None, None) => return Err(CliError::Usage("missing --out".into())),
            };
            let format: Format = {
                let s = resolve(format, &config, "format", "csv".to_string())?;
                s.parse().map_err(CliError::Usage)?
            };
            commands::cmd_sweep(
                &SweepArgs {
                    d: r.d,
                    noise: &r.noise,
                    gamma: &r.gamma,
                    basis: &r.basis,
                    gamma_label: r.gamma_label,
                    basis_label: r.basis_label,
                    method: r.method,
                    n_samples: r.n_samples,
                    seed: r.seed,
                    format,
                },
                &out,
            )?;
            Ok(0)
        }
        Command::Optimize { d, p } => {
            let d_raw: usize = resolve_required(d, &config, "d")?;
            let d = Dim::new(d_raw).map_err(CliError::from)?;
            let p: f64 = resolve_required(p, &config, "p")?;
            commands::cmd_optimize(d, p)?;
            Ok(0)
        }
        Command::Validate { level } => validate::run(&level),
        Command::Scatter {
            d,
            n,
            seed,
            curve_points,
            out,
            format,
        } => {
            let d_raw: usize = resolve_required(d, &config, "d")?;
            let d = Dim::new(d_raw).map_err(CliError::from)?;
            let n = resolve(n, &config, "n", 10_000)?;
            let seed = resolve(seed, &config, "seed", 0)?;
            let curve_points = resolve(curve_points, &config, "curve_points", 201)?;
            let out = match (out, config.get("out")) {
                (Some(p), _) => p,
                (None, Some(s)) => PathBuf::from(s),
                (None, None) => return Err(CliError::Usage("missing --out".into())),
            };
            let format: Format = {
                let s = resolve(format, &config, "format", "csv".to_string())?;
                s.parse().map_err(CliError::Usage)?
            };
            commands::cmd_scatter(d, n, seed, curve_points, format, &out)?;
            Ok(0)
        }
        Command::Thresholds { d } => {
            let d_raw: usize = resolve_required(d, &config, "d")?;
            let d = Dim::new(d_raw).map_err(CliError::from)?;
            commands::cmd_thresholds(d)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

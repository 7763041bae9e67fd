//! `qreset`: diplexer design, dissipator modes and transmon reset simulations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod svg;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qreset::dynamics::DynamicsError;
use qreset::modes::ModeError;
use qreset::readout::ReadoutError;
use qreset::reset::ResetError;
use qreset::rf::NetworkError;

use config::{Format, Protocol, RunConfig};
use output::{sha256_hex, Manifest, Outputs, Versions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numeric(String),
    #[error("{0} cell(s) failed; see failures.json")]
    Partial(usize),
}

impl CliError {
    pub fn config(msg: String) -> Self {
        Self::Config(msg)
    }

    pub fn numeric(msg: String) -> Self {
        Self::Numeric(msg)
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
            Self::Partial(_) => 4,
        }
    }
}

macro_rules! numeric_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::Numeric(e.to_string())
            }
        }
    )*};
}
numeric_from!(NetworkError, ModeError, DynamicsError, ReadoutError);

impl From<ResetError> for CliError {
    fn from(e: ResetError) -> Self {
        match e {
            ResetError::InvalidSweep(m) => Self::Config(format!("invalid sweep: {m}")),
            e => Self::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qreset",
    version,
    about = "Diplexer, dissipator-mode and transmon-reset simulations"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// JSON run configuration (defaults are used when absent).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.directory`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Readout Monte-Carlo seed (overrides `readout.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Which files to write (overrides `output.format`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Command {
    /// S-parameters of the filters, the LP-line-LP cavity and diplexer isolation.
    Sparams {
        /// Frequency band, e.g. `1:10GHz`.
        #[arg(long, value_parser = units::band)]
        band: Option<(f64, f64)>,
    },
    /// Dissipator modes, linewidths and Purcell suppression.
    Modes,
    /// Purcell rate over coupling and detuning.
    GammaMap,
    /// Excited population after a square flux pulse, over plateau frequency and duration.
    ResetSweep,
    /// Reset benchmarks with simulated single-shot readout.
    ResetBench {
        #[arg(long, value_enum)]
        protocol: Option<ProtocolArg>,
    },
    /// Convert between bath temperature and thermal excited population.
    Thermal {
        /// Transition frequency, e.g. `4.86GHz` (default: qubit maximum).
        #[arg(long, value_parser = units::frequency)]
        freq: Option<f64>,
        /// Temperature, e.g. `41mK`.
        #[arg(long, value_parser = units::temperature, conflicts_with = "population")]
        temp: Option<f64>,
        /// Excited population, e.g. `0.34%`.
        #[arg(long, value_parser = units::probability)]
        population: Option<f64>,
    },
    /// Fit ladder element values to the target cutoffs.
    FitFilter,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ProtocolArg {
    Eg,
    Fe,
    Concatenated,
    All,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Eg => Protocol::Eg,
            ProtocolArg::Fe => Protocol::Fe,
            ProtocolArg::Concatenated => Protocol::Concatenated,
            ProtocolArg::All => Protocol::All,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sparams { .. } => "sparams",
            Command::Modes => "modes",
            Command::GammaMap => "gamma-map",
            Command::ResetSweep => "reset-sweep",
            Command::ResetBench { .. } => "reset-bench",
            Command::Thermal { .. } => "thermal",
            Command::FitFilter => "fit-filter",
        }
    }
}

fn effective_config(g: &Global) -> Result<RunConfig, CliError> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &g.out {
        cfg.output.directory = d.clone();
    }
    if let Some(s) = g.seed {
        cfg.readout.seed = s;
    }
    if let Some(f) = g.format {
        cfg.output.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, started: Instant) -> Result<(), CliError> {
    let cfg = effective_config(&cli.global)?;
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            return Err(CliError::config("--jobs must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::config(format!("--jobs: {e}")))?;
    }
    let arguments =
        serde_json::to_value(&cli.command).map_err(|e| CliError::numeric(e.to_string()))?;
    let inputs = serde_json::to_vec(&serde_json::json!({ "config": &cfg, "command": &arguments }))
        .map_err(|e| CliError::numeric(e.to_string()))?;
    let mut out = Outputs::new(&cfg.output.directory, cfg.output.format)?;

    let result = {
        let r = commands::Run {
            cfg: &cfg,
            out: &mut out,
        };
        match &cli.command {
            Command::Sparams { band } => commands::sparams(r, *band),
            Command::Modes => commands::modes(r),
            Command::GammaMap => commands::gamma_map_cmd(r),
            Command::ResetSweep => {
                commands::reset_sweep_cmd(r).and_then(|failures| match failures.len() {
                    0 => Ok(()),
                    n => Err(CliError::Partial(n)),
                })
            }
            Command::ResetBench { protocol } => commands::reset_bench(r, protocol.map(Into::into)),
            Command::Thermal {
                freq,
                temp,
                population,
            } => commands::thermal(r, *freq, *temp, *population),
            Command::FitFilter => commands::fit_filter(r),
        }
    };

    let status = match &result {
        Ok(()) => "ok",
        Err(CliError::Partial(_)) => "partial",
        Err(_) => "failed",
    };
    let manifest = Manifest {
        command: cli.command.name().to_string(),
        arguments,
        inputs_sha256: sha256_hex(&inputs),
        seed: cfg.readout.seed,
        jobs: cli.global.jobs,
        versions: Versions {
            qreset: qreset::VERSION,
            qreset_cli: env!("CARGO_PKG_VERSION"),
        },
        started_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
            .saturating_sub(started.elapsed().as_secs()),
        wall_time_s: started.elapsed().as_secs_f64(),
        status,
        files: out.files.clone(),
    };
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::numeric(e.to_string()))?;
    let path = out.dir().join("manifest.json");
    std::fs::write(&path, text + "\n")
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    result
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match run(&cli, started) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qreset {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}

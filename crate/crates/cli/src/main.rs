mod commands;
mod config;
mod table;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use whitham_crest::wave_solver::WaveFamily;

use crate::table::Format;

/// Highest steady Whitham-type waves: identities, kernels, solver,
/// crest asymptotics and residual checks.
#[derive(Debug, Parser)]
#[command(name = "whitham-crest", version, args_override_self = true)]
pub struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,
    /// Format of check tables whose path has no .csv/.json extension.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value = "info")]
    pub log_level: log::LevelFilter,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integral identities, constants, inequality scan and toy equation.
    Identities {
        #[arg(long)]
        report: Option<PathBuf>,
        /// Grid resolution of the (m, M) scan.
        #[arg(long, default_value_t = 400)]
        scan_resolution: usize,
        /// Relative slack admitted in the scanned inequalities.
        #[arg(long, default_value_t = 1e-3)]
        scan_slack: f64,
    },
    /// Kernel evaluators against the inverse-transform oracle, and bound checks.
    Kernel {
        #[arg(long, default_value = "whitham")]
        family: WaveFamily,
        #[arg(long, default_value_t = 0.1)]
        x_min: f64,
        #[arg(long, default_value_t = 5.0)]
        x_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Relative tolerance against the oracle.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Plot-ready CSV of kernel values.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Continue a branch of steady waves up to the highest wave.
    Solve {
        #[arg(long, default_value = "whitham")]
        family: WaveFamily,
        #[arg(long, default_value_t = 1024)]
        modes: usize,
        #[arg(long, default_value_t = 1e-4)]
        stop_gap: f64,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        period: f64,
        #[arg(long, default_value_t = 0.1)]
        landing_fraction: f64,
        #[arg(long, default_value = "profile.json")]
        out: PathBuf,
        /// CSV of accepted continuation steps.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Crest limits, corollary constant and spectral decay of a profile.
    Asymptotics {
        #[arg(long = "in")]
        input: PathBuf,
        /// Gap below the maximal height that still counts as highest.
        #[arg(long, default_value_t = 1e-4)]
        stop_gap: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Condensed-equation residuals of a profile by direct quadrature.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        stop_gap: f64,
        /// Sample abscissae; defaults to kP/32 for k = 1..8.
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Merge check tables into one summary, failures first.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Cli {
    /// Joins relative output paths onto `output_dir`.
    pub fn output_path(&self, p: &std::path::Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.output_dir.join(p)
        }
    }
}

fn long_names(cmd: &clap::Command) -> BTreeSet<String> {
    cmd.get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect()
}

/// Parses argv after splicing in the config file; usage errors exit 2.
fn parse_args(mut args: Vec<String>) -> Result<Cli, clap::Error> {
    let mut cmd = Cli::command();
    let usage = |msg: String| clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{msg}\n"));
    let config_path = config::take_config_flag(&mut args).map_err(usage)?;
    if let Some(path) = config_path {
        let entries = config::load(std::path::Path::new(&path)).map_err(usage)?;
        cmd.build();
        let globals = long_names(&cmd);
        let mut known = globals.clone();
        for sc in cmd.get_subcommands() {
            known.extend(long_names(sc));
        }
        let at = args.iter().position(|a| cmd.get_subcommands().any(|s| s.get_name() == a));
        let mut accepted = globals;
        if let Some(i) = at {
            if let Some(sc) = cmd.find_subcommand(&args[i]) {
                accepted.extend(long_names(sc));
            }
        }
        config::splice(&mut args, &entries, at, &accepted, &known).map_err(usage)?;
    }
    let matches = Cli::command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args().collect()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .init();
    log::info!("resolved config: {cli:?}");
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(commands::RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::RunError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

//! `freqflow` command-line interface.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freqflow::power_circle::{DEFAULT_N_THETA, DEFAULT_N_VD};

use crate::commands::Output;
use crate::config::StudyConfig;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Bad arguments, unreadable or invalid configuration, I/O.
    #[error("{0:#}")]
    Usage(#[from] anyhow::Error),
    #[error("{0}")]
    Compute(#[from] freqflow::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Compute(_) => 2,
        }
    }
}

/// Frequency-dependent transmission capacity of a single line.
#[derive(Debug, Parser)]
#[command(name = "freqflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Study configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Apply the thermal limit at the origin end only.
    #[arg(long)]
    origin_only_thermal: bool,
}

#[derive(Debug, Args)]
struct Range {
    #[arg(long)]
    freq_min: Option<f64>,
    #[arg(long)]
    freq_max: Option<f64>,
    #[arg(long)]
    freq_step: Option<f64>,
}

impl Range {
    fn or(&self, min: f64, max: f64, step: f64) -> (f64, f64, f64) {
        (
            self.freq_min.unwrap_or(min),
            self.freq_max.unwrap_or(max),
            self.freq_step.unwrap_or(step),
        )
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Series/shunt parameters, γℓ, Z₀ and Π-model error at one frequency.
    LineInfo {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 60.0)]
        freq: f64,
        /// Comma-separated lengths in km (default: the configured length).
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<f64>>,
    },
    /// Π-model error table over lengths and frequencies.
    PiError {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: Range,
        #[arg(long, value_delimiter = ',', default_value = "100,200,300,400,500,600,700")]
        lengths: Vec<f64>,
    },
    /// Maximum active power versus frequency, with a JSON breakpoint summary.
    MaxPower {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: Range,
        /// Breakpoint JSON path (default: `<out>.json` when --out is given).
        #[arg(long)]
        breakpoints: Option<PathBuf>,
    },
    /// Power circles and the feasible (P, Q) region at one frequency.
    PowerCircle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 60.0)]
        freq: f64,
        /// Lattice size as `<n_vd>x<n_theta>`.
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<(usize, usize)>,
    },
    /// Flows and constraint report at one operating point.
    #[command(allow_negative_numbers = true)]
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 60.0)]
        freq: f64,
        #[arg(long, default_value_t = 1.0)]
        v_o: f64,
        #[arg(long)]
        v_d: f64,
        #[arg(long)]
        theta_deg: f64,
    },
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected <n_vd>x<n_theta>, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let (common, output, breakpoints) = match cli.command {
        Command::LineInfo { common, freq, lengths } => {
            let cfg = StudyConfig::load(&common.config)?;
            let out = commands::line_info(&cfg, freq, lengths.as_deref())?;
            (common, out, None)
        }
        Command::PiError { common, range, lengths } => {
            let cfg = StudyConfig::load(&common.config)?;
            let (lo, hi, step) = range.or(0.0, 80.0, 1.0);
            let out = commands::pi_error(&cfg, lo, hi, step, &lengths)?;
            (common, out, None)
        }
        Command::MaxPower {
            common,
            range,
            breakpoints,
        } => {
            let study = StudyConfig::load(&common.config)?.study(common.origin_only_thermal)?;
            let (lo, hi, step) = range.or(0.0, 60.0, 0.05);
            let out = commands::max_power(&study, lo, hi, step)?;
            let sidecar = breakpoints.or_else(|| common.out.as_ref().map(|p| sidecar_path(p)));
            (common, out, sidecar)
        }
        Command::PowerCircle {
            common,
            freq,
            resolution,
        } => {
            let study = StudyConfig::load(&common.config)?.study(common.origin_only_thermal)?;
            let (n_vd, n_theta) = resolution.unwrap_or((DEFAULT_N_VD, DEFAULT_N_THETA));
            let out = commands::power_circle(&study, freq, n_vd, n_theta)?;
            (common, out, None)
        }
        Command::Check {
            common,
            freq,
            v_o,
            v_d,
            theta_deg,
        } => {
            let study = StudyConfig::load(&common.config)?.study(common.origin_only_thermal)?;
            let out = commands::check(&study, freq, v_o, v_d, theta_deg)?;
            (common, out, None)
        }
    };
    emit(&common, &output, breakpoints.as_deref())?;
    Ok(output.status)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn emit(common: &Common, output: &Output, sidecar: Option<&Path>) -> anyhow::Result<()> {
    use anyhow::Context;
    match &common.out {
        Some(path) => std::fs::write(path, &output.main).with_context(|| format!("write {}", path.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(output.main.as_bytes())?;
        }
    }
    if let (Some(path), Some(doc)) = (sidecar, &output.sidecar) {
        std::fs::write(path, doc).with_context(|| format!("write {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(failure) => {
            match &failure {
                Failure::Compute(e) => eprintln!("error: {}: {e}", e.name()),
                Failure::Usage(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

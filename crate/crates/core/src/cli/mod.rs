//! The `sqcc` command-line front end.
//!
//! Exit codes: 0 on success (including sweeps with flagged rows), 1 on a
//! hard numeric or I/O failure, 2 on a usage error. Failures print one JSON
//! record on standard error.

pub mod args;
pub mod commands;
pub mod output;

use args::{Cli, Command, ConfigFile, UsageError, OUTPUT_DIR_ENV};
use clap::Parser;
use commands::{CommandError, Report};
use output::{write_rows, Format};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::mc::SymbolSchedule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SWEEP_T_GRID: &str = "log:0.01:0.9:50";
const DEFAULT_EPS: f64 = 0.05;
const DEFAULT_QOS: [f64; 1] = [1e-3];
const SCAN_T: [f64; 1] = [0.1];
const SCAN_V: [f64; 1] = [5.0];

fn scan_displacements() -> Vec<f64> {
    (0..=10).map(|i| 2.0 * i as f64).collect()
}

fn error_record(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

/// Parse `argv` (program name first), run, write output and return the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprintln!("{}", error_record("usage", e.to_string().trim_end()));
                    EXIT_USAGE
                }
            };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(CommandError::Usage(e)) => {
            eprintln!("{}", error_record("usage", &e.0));
            EXIT_USAGE
        }
        Err(CommandError::Hard(e)) => {
            eprintln!("{}", error_record(e.kind(), &e.to_string()));
            EXIT_FAILURE
        }
        Err(CommandError::Io(e)) => {
            eprintln!("{}", error_record("io", &e.to_string()));
            EXIT_FAILURE
        }
    }
}

/// Rows a command would emit, without writing them anywhere.
pub fn execute(cli: &Cli) -> Result<Report, CommandError> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let sweep_t = args::parse_grid(SWEEP_T_GRID)?;
    match &cli.command {
        Command::SweepAsymptotic { channel, signal, rate } => commands::sweep_asymptotic(
            &channel.resolve(&cfg, &sweep_t, DEFAULT_EPS)?,
            &signal.resolve(&cfg, &DEFAULT_QOS, None, None)?,
            &rate.resolve(&cfg)?,
        ),
        Command::SweepFinite { channel, signal, rate, finite } => commands::sweep_finite(
            &channel.resolve(&cfg, &sweep_t, DEFAULT_EPS)?,
            &signal.resolve(&cfg, &DEFAULT_QOS, None, None)?,
            &rate.resolve(&cfg)?,
            &finite.resolve(&cfg, Some(&[100_000_000]))?,
        ),
        Command::Optimize { channel, signal, rate, finite } => commands::optimize(
            &channel.resolve(&cfg, &sweep_t, DEFAULT_EPS)?,
            &signal.resolve(&cfg, &DEFAULT_QOS, None, None)?,
            &rate.resolve(&cfg)?,
            &finite.resolve(&cfg, None)?,
        ),
        Command::CompareBaseline { channel, signal, rate } => commands::compare_baseline(
            &channel.resolve(&cfg, &sweep_t, DEFAULT_EPS)?,
            &signal.resolve(&cfg, &DEFAULT_QOS, None, None)?,
            &rate.resolve(&cfg)?,
        ),
        Command::Simulate { channel, signal, rate, mc } => commands::simulate(
            &channel.resolve(&cfg, &SCAN_T, DEFAULT_EPS)?,
            &signal.resolve(&cfg, &DEFAULT_QOS, Some(&SCAN_V), None)?,
            &rate.resolve(&cfg)?,
            &mc.resolve(&cfg, SymbolSchedule::Uniform)?,
        ),
        Command::ValidateFig2 { channel, signal, mc } => commands::validate_fig2(
            &channel.resolve(&cfg, &SCAN_T, DEFAULT_EPS)?,
            &signal.resolve(&cfg, &DEFAULT_QOS, Some(&SCAN_V), Some(&scan_displacements()))?,
            &mc.resolve(&cfg, SymbolSchedule::Uniform)?,
        ),
    }
}

/// Where output goes: `--out`, then the config's `out`, then
/// `$SQCC_OUTPUT_DIR/<command>.<ext>`, then standard output.
fn destination(cli: &Cli, cfg: &ConfigFile, format: Format) -> Result<Option<PathBuf>, UsageError> {
    if let Some(p) = cli.out.clone().or(cfg.out()?) {
        return Ok(Some(p));
    }
    Ok(std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(format!("{}.{}", cli.command.name(), format.extension()))))
}

pub fn run(cli: &Cli) -> Result<(), CommandError> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let format = args::resolve_format(cli.format.as_deref(), &cfg)?;
    let dest = destination(cli, &cfg, format)?;
    let report = execute(cli)?;
    match dest {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let file = std::fs::File::create(&path)
                .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            write_rows(&report.rows, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_rows(&report.rows, format, &mut lock)?;
            lock.flush()?;
        }
    }
    if report.failed > 0 {
        eprintln!(
            "{}",
            serde_json::json!({ "warning": "rows_failed", "count": report.failed, "rows": report.rows.len() })
        );
    }
    Ok(())
}

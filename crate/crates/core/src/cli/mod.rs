//! Command-line front end: `solve`, `verify`, `identity` and `emit`.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails, 2 for
//! configuration errors, 3 when a numerical stage breaks down and nothing failed.

pub mod config;
pub mod pipeline;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{Check, ConfigError, RunConfig};
pub use pipeline::{run_identities, run_points, series_rows, Series};
pub use report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "baxter-tq", version, about = "Bethe roots, H series, Wronskian theta and bilateral identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Bethe equations at every grid point.
    Solve(Common),
    /// Full pipeline and identity checks at every grid point.
    Verify(Common),
    /// The 1psi1 and general bilateral identities over the [identity] grids.
    Identity(Common),
    /// Dump the coefficients of one object at a single grid point as CSV.
    Emit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        which: Series,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Report (or CSV) path; overrides the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Comma-separated subset of bae,hq,q2,bae2,rr,onepsi1,rrgen.
    #[arg(long)]
    pub check: Option<String>,
}

fn load(common: &Common) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::from_path(&common.config)?;
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(ConfigError("--workers: must be positive".into()));
        }
        cfg.workers = Some(w);
    }
    if let Some(list) = &common.check {
        cfg.checks = config::parse_check_list(list)?;
    }
    if let Some(out) = &common.out {
        cfg.report = Some(out.clone());
    }
    Ok(cfg)
}

fn summary_path(report: &Path) -> PathBuf {
    if report.extension().is_some_and(|e| e == "txt") {
        let mut name = report.file_stem().unwrap_or_default().to_os_string();
        name.push(".summary.txt");
        report.with_file_name(name)
    } else {
        report.with_extension("txt")
    }
}

fn write_report(report: &Report, cfg: &RunConfig) -> Result<(), String> {
    let summary = report.summary_text();
    match &cfg.report {
        Some(path) => {
            std::fs::write(path, report.to_json()).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            let spath = cfg.summary.clone().unwrap_or_else(|| summary_path(path));
            std::fs::write(&spath, &summary).map_err(|e| format!("cannot write {}: {e}", spath.display()))?;
            print!("{summary}");
        }
        None => {
            print!("{}", report.to_json());
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn need_points(cfg: &RunConfig) -> Result<(), ConfigError> {
    if cfg.points.is_empty() {
        return Err(ConfigError("params: missing [params] table".into()));
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("{e}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_NUMERICAL
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{msg}");
            EXIT_CONFIG
        }
    }
}

enum Failure {
    Config(ConfigError),
    Numerical(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Solve(common) => {
            let cfg = load(&common)?;
            need_points(&cfg)?;
            let report = run_points("solve", &cfg, &[Check::Bae]);
            write_report(&report, &cfg).map_err(Failure::Io)?;
            Ok(report.summary.exit_code)
        }
        Command::Verify(common) => {
            let cfg = load(&common)?;
            need_points(&cfg)?;
            let report = run_points("verify", &cfg, &cfg.checks);
            write_report(&report, &cfg).map_err(Failure::Io)?;
            Ok(report.summary.exit_code)
        }
        Command::Identity(common) => {
            let cfg = load(&common)?;
            if cfg.onepsi1.is_empty() && cfg.rrgen.is_empty() {
                return Err(ConfigError("identity: no [identity.onepsi1] grid or [[identity.rrgen]] case".into()).into());
            }
            let report = run_identities(&cfg);
            write_report(&report, &cfg).map_err(Failure::Io)?;
            Ok(report.summary.exit_code)
        }
        Command::Emit { common, which } => {
            let cfg = load(&common)?;
            need_points(&cfg)?;
            if cfg.points.len() != 1 {
                return Err(ConfigError(format!("params: emit needs a single grid point, got {}", cfg.points.len())).into());
            }
            let rows = series_rows(which, &cfg.points[0], &cfg).map_err(|e| Failure::Numerical(e.to_string()))?;
            let table = report::coefficient_table(&rows);
            match &cfg.report {
                Some(path) => std::fs::write(path, table)
                    .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{table}"),
            }
            Ok(EXIT_PASS)
        }
    }
}

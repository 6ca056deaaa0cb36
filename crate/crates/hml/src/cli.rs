//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hml_core::moments::{MomentKind, DEFAULT_EPS_SLACK};
use hml_core::precision::DEFAULT_PREC_BITS;

use crate::grid::parse_grid;
use crate::run::{run, Command, RunConfig};
use crate::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "hml", version, about = "Numerical verification of mean values of Hardy's Z-function")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run one experiment kind over a grid.
    Verify(JobArgs),
    /// Run a calibration kind (hardy_z, second_moment, z3_dyadic).
    Calibrate(JobArgs),
    /// As verify, printing the running fitted constant per row.
    Sweep(JobArgs),
    /// Build a divisor-table cache file.
    Table(TableArgs),
}

#[derive(Debug, Args)]
struct JobArgs {
    /// th1, th2, th3, th4, hardy_z, second_moment, z3_dyadic, j_dyadic, i_dyadic, s1_bound.
    #[arg(long)]
    kind: Option<String>,
    /// e.g. "T=500:16000:x2" or "N=1000;A=0.5,1,2,4".
    #[arg(long)]
    grid: String,
    /// Working precision in bits.
    #[arg(long = "prec", env = "HML_PREC_BITS", default_value_t = DEFAULT_PREC_BITS)]
    prec: u32,
    #[arg(long = "eps", default_value_t = DEFAULT_EPS_SLACK)]
    eps: f64,
    /// Absolute quadrature tolerance per integral.
    #[arg(long)]
    tol: Option<f64>,
    /// Divisor-table cache; read when present, written when built.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long)]
    nmax: u64,
    #[arg(long)]
    out: PathBuf,
}

fn job_config(command: Command, a: JobArgs) -> Result<RunConfig, CliError> {
    let kind = match (&a.kind, command) {
        (Some(k), _) => Some(k.parse::<MomentKind>().map_err(|e| CliError::Config(e.to_string()))?),
        (None, Command::Calibrate) => Some(MomentKind::SecondMoment),
        (None, _) => None,
    };
    Ok(RunConfig {
        command,
        kind,
        grid: parse_grid(&a.grid)?,
        prec_bits: a.prec,
        eps_slack: a.eps,
        tol: a.tol,
        table_path: a.table,
        out_path: a.out,
        jobs: a.jobs,
        nmax: None,
    })
}

/// Parses the arguments into a config without running anything.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let cfg = match cli.command {
        Cmd::Verify(a) => job_config(Command::Verify, a),
        Cmd::Calibrate(a) => job_config(Command::Calibrate, a),
        Cmd::Sweep(a) => job_config(Command::Sweep, a),
        Cmd::Table(t) => Ok(RunConfig {
            command: Command::Table,
            kind: None,
            grid: Vec::new(),
            prec_bits: DEFAULT_PREC_BITS,
            eps_slack: DEFAULT_EPS_SLACK,
            tol: None,
            table_path: None,
            out_path: t.out,
            jobs: 1,
            nmax: Some(t.nmax),
        }),
    };
    cfg.map_err(|e| clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{e}\n")))
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_config(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => exit::OK,
                _ => exit::CONFIG,
            };
            let _ = e.print();
            code
        }
    }
}

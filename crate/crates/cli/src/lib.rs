//! `qpdm`: figure datasets, ad-hoc evaluations and the verification suite
//! for the position-dependent-mass particle, emitted as CSV or JSON.
//!
//! Data goes to stdout (or `--output`), diagnostics to stderr. Exit codes:
//! `0` success, `1` verification or numerical failure, `2` usage error,
//! `3` domain error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod lists;
pub mod qalg;
pub mod table;
pub mod translate;
pub mod verify;
pub mod well;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "qpdm", version, about = "q-deformed position-dependent-mass toolkit")]
pub struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write the dataset here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Suppress diagnostics on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infinite square well: spectrum, densities, moments (units L = m = hbar = 1).
    #[command(subcommand)]
    Well(well::WellCommand),
    /// Classical deformed dynamics: trajectories and the box time average.
    #[command(subcommand, name = "classical-sim")]
    ClassicalSim(classical::SimCommand),
    /// Evaluate a q-algebra operation over lists of arguments.
    Qalg(qalg::QalgArgs),
    /// Apply the deformed translation to a Gaussian packet.
    Translate(translate::TranslateArgs),
    /// Run the verification suite; exits 1 if any check fails.
    Check(verify::CheckArgs),
}

/// Shared `--gamma-L` flag: repeatable, comma lists, `a..b[:steps]` ranges.
#[derive(Debug, Clone, Args)]
pub struct GammaList {
    /// gamma L values (> -1); lists `0,1,2` and ranges `a..b[:steps]`.
    #[arg(long = "gamma-L", visible_alias = "gamma-l", allow_hyphen_values = true)]
    pub gamma_l: Vec<String>,
}

impl GammaList {
    pub fn values_or(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = if self.gamma_l.is_empty() {
            default.to_vec()
        } else {
            lists::parse_reals(&self.gamma_l).map_err(CliError::Usage)?
        };
        for &g in &v {
            if !(g > -1.0) {
                return Err(CliError::Usage(format!("gamma L must be > -1, got {g}")));
            }
        }
        Ok(v)
    }
}

pub fn quantum_numbers(items: &[String], default: &[usize]) -> Result<Vec<usize>, CliError> {
    if items.is_empty() {
        Ok(default.to_vec())
    } else {
        lists::parse_quantum_numbers(items).map_err(CliError::Usage)
    }
}

pub fn check_grid_points(n: usize) -> Result<usize, CliError> {
    if n < 2 {
        Err(CliError::Usage(format!("grid points must be >= 2, got {n}")))
    } else {
        Ok(n)
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(qpdm_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qpdm_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::InvalidParameter(_)) => 2,
            CliError::Core(e) if e.is_domain() => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<qpdm_core::Error> for CliError {
    fn from(e: qpdm_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Diagnostics sink for stderr.
pub struct Log<'a> {
    sink: &'a mut dyn Write,
    quiet: bool,
}

impl<'a> Log<'a> {
    pub fn new(sink: &'a mut dyn Write, quiet: bool) -> Self {
        Self { sink, quiet }
    }

    pub fn line(&mut self, msg: impl AsRef<str>) {
        if !self.quiet {
            // a closed stderr is not worth failing the run over
            let _ = writeln!(self.sink, "{}", msg.as_ref());
        }
    }
}

/// A produced dataset plus whether the command's own verification passed.
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, passed: true }
    }
}

pub fn execute(command: &Command, log: &mut Log) -> Result<Outcome, CliError> {
    match command {
        Command::Well(c) => well::run(c, log).map(Outcome::from),
        Command::ClassicalSim(c) => classical::run(c, log).map(Outcome::from),
        Command::Qalg(a) => qalg::run(a, log).map(Outcome::from),
        Command::Translate(a) => translate::run(a, log).map(Outcome::from),
        Command::Check(a) => verify::run(a, log),
    }
}

fn emit(table: &Table, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => table.write_csv(out),
        Format::Json => table.write_json(out),
    }?;
    out.flush()
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let mut log = Log::new(err, cli.quiet);
    let outcome = match execute(&cli.command, &mut log) {
        Ok(o) => o,
        Err(e) => {
            log.quiet = false;
            log.line(format!("error: {e}"));
            return e.exit_code();
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::File::create(path)
            .map(std::io::BufWriter::new)
            .and_then(|mut f| emit(&outcome.table, cli.format, &mut f)),
        None => emit(&outcome.table, cli.format, out),
    };
    if let Err(e) = written {
        // a downstream reader such as `head` closing early is not an error
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return if outcome.passed { 0 } else { 1 };
        }
        log.quiet = false;
        log.line(format!("error: {}", CliError::Io(e)));
        return 1;
    }
    if outcome.passed {
        0
    } else {
        1
    }
}

//! Command-line front end: argument handling, JSON/CSV/SVG emitters and exit
//! codes.

pub mod args;
pub mod emit;
pub mod render;
pub mod sample;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};

use clap::Parser;
use snowflake_core::Error;

use args::{Cli, Command, Format, Output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(e) if e.is_invariant_violation() => EXIT_INVARIANT,
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }
}

/// Runs with process stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((output, body)) => match deliver(output, &body, out) {
            Ok(()) => EXIT_OK,
            Err(e) => report(e, err),
        },
        Err(e) => report(e, err),
    }
}

fn report(e: CliError, err: &mut dyn Write) -> i32 {
    let code = e.exit_code();
    let _ = if code == EXIT_INVARIANT {
        writeln!(err, "error: {e}\nthis indicates a bug; please report it with the command line above")
    } else {
        writeln!(err, "error: {e}")
    };
    code
}

fn deliver(output: &Output, body: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, body)?,
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn check_level(cli: &Cli, level: usize) -> Result<(), CliError> {
    if level > cli.max_level {
        return Err(Error::LevelBudget { level, max: cli.max_level }.into());
    }
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start workers: {e}")))
}

fn format_or(output: &Output, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = output.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(CliError::Usage(format!("format {f:?} is not available here")));
    }
    Ok(f)
}

fn execute(cli: &Cli) -> Result<(&Output, String), CliError> {
    use Format::*;
    Ok(match &cli.command {
        Command::Boundary(a) => {
            check_level(cli, a.level)?;
            let f = format_or(&a.output, Json, &[Json, Svg])?;
            (&a.output, emit::boundary(a.level, f)?)
        }
        Command::Classify(a) => {
            format_or(&a.output, Json, &[Json])?;
            (&a.output, emit::classify(&a.x0, a.level)?)
        }
        Command::Orbit(a) => {
            check_level(cli, a.level)?;
            let f = format_or(&a.output, Json, &[Json, Svg])?;
            (&a.output, emit::orbit(a, f)?)
        }
        Command::Footprint(a) => {
            check_level(cli, a.level)?;
            let f = format_or(&a.output, Json, &[Json, Csv])?;
            (&a.output, emit::footprint(a, f)?)
        }
        Command::Sequence(a) => {
            check_level(cli, a.n_max)?;
            format_or(&a.output, Json, &[Json])?;
            (&a.output, emit::sequence(a)?)
        }
        Command::Straighten(a) => {
            format_or(&a.output, Text, &[Text, Json])?;
            (&a.output, emit::straighten(a)?)
        }
        Command::Address(a) => {
            check_level(cli, a.level)?;
            let f = format_or(&a.output, Text, &[Text, Json])?;
            (&a.output, emit::address(a, f)?)
        }
        Command::Probe(a) => {
            check_level(cli, a.level)?;
            format_or(&a.output, Json, &[Json])?;
            (&a.output, pool(a.workers)?.install(|| emit::probe(a))?)
        }
        Command::Study(a) => {
            check_level(cli, a.n_max)?;
            let f = format_or(&a.output, Csv, &[Csv, Json])?;
            (&a.output, pool(a.workers)?.install(|| emit::study(a, f))?)
        }
        Command::Genus(a) => {
            check_level(cli, a.level)?;
            let f = format_or(&a.output, Text, &[Text, Json])?;
            (&a.output, emit::genus(a.level, f)?)
        }
        Command::Render(a) => {
            check_level(cli, a.level)?;
            format_or(&a.output, Svg, &[Svg])?;
            (&a.output, emit::render(a)?)
        }
    })
}

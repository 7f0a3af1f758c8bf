//! Command-line front end.
//!
//! Exit codes: 0 success (or methods agree), 1 bad input or usage,
//! 2 computation error, 3 methods disagree.

mod commands;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use self::commands::{
    cmd_compare, cmd_eps, cmd_fl, cmd_sheets, cmd_track, EpsReport, FlReport, GeneratorReport,
    KernelReport, SheetGrid, TrackReport, WordReport,
};

use crate::error::Error;
use crate::formats::Scenario;
use crate::monodromy::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Locate and classify degeneracies.
    Eps,
    /// Track eigenvalues around a loop.
    Track,
    /// Build keyhole generators; evaluate words and search the kernel.
    Fl,
    /// Compare tracking with the branch-cut method on a loop.
    Compare,
    /// Sample the eigenvalue sheets on a grid.
    Sheets,
}

#[derive(Debug, Parser)]
#[command(name = "epmono", version, about = "Eigenvalue permutations around exceptional points")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Loop name for `track` and `compare`.
    #[arg(long = "loop")]
    pub loop_name: Option<String>,
    /// Word in the generators for `fl`, e.g. "g1 g2^-1".
    #[arg(long)]
    pub word: Option<String>,
    /// Kernel search length for `fl`.
    #[arg(long)]
    pub kernel: Option<usize>,
    /// Directory for JSON and CSV output files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced, before printing.
struct Output {
    name: &'static str,
    json: String,
    csv: Option<String>,
    /// Print the CSV instead of the JSON when there is no output directory.
    csv_primary: bool,
    code: i32,
}

/// Parses `argv`, runs the command, prints, and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&args) {
        Ok(out) => match emit(&args, &out, stdout) {
            Ok(()) => out.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_INPUT
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_COMPUTATION
            }
        }
    }
}

fn usage(msg: &str) -> Error {
    Error::InvalidInput(msg.to_string())
}

fn execute(args: &Args) -> Result<Output, Error> {
    if args.command != Command::Fl && (args.word.is_some() || args.kernel.is_some()) {
        return Err(usage("--word and --kernel apply only to the fl command"));
    }
    if !matches!(args.command, Command::Track | Command::Compare) && args.loop_name.is_some() {
        return Err(usage("--loop applies only to the track and compare commands"));
    }
    let scenario = Scenario::load(&args.scenario)?;
    Ok(match args.command {
        Command::Eps => Output {
            name: "eps",
            json: pretty(&cmd_eps(&scenario)?)?,
            csv: None,
            csv_primary: false,
            code: EXIT_OK,
        },
        Command::Track => {
            let report = cmd_track(&scenario, args.loop_name.as_deref())?;
            Output {
                name: "track",
                json: pretty(&report)?,
                csv: Some(report.csv.clone()),
                csv_primary: false,
                code: EXIT_OK,
            }
        }
        Command::Fl => {
            let word = args.word.as_deref().map(str::parse::<Word>).transpose()?;
            Output {
                name: "fl",
                json: pretty(&cmd_fl(&scenario, word.as_ref(), args.kernel)?)?,
                csv: None,
                csv_primary: false,
                code: EXIT_OK,
            }
        }
        Command::Compare => {
            let report = cmd_compare(&scenario, args.loop_name.as_deref())?;
            Output {
                name: "compare",
                json: pretty(&report)?,
                csv: None,
                csv_primary: false,
                code: if report.agree { EXIT_OK } else { EXIT_MISMATCH },
            }
        }
        Command::Sheets => {
            let grid = cmd_sheets(&scenario)?;
            Output {
                name: "sheets",
                json: pretty(&grid.summary())?,
                csv: Some(grid.to_csv()?),
                csv_primary: true,
                code: EXIT_OK,
            }
        }
    })
}

fn emit(args: &Args, out: &Output, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.json", out.name)), &out.json)?;
            if let Some(csv) = &out.csv {
                std::fs::write(dir.join(format!("{}.csv", out.name)), csv)?;
            }
            writeln!(stdout, "{}", out.json)
        }
        None if out.csv_primary => write!(stdout, "{}", out.csv.as_deref().unwrap_or_default()),
        None => writeln!(stdout, "{}", out.json),
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(value)?)
}

//! Command-line front end: graph DSL, queries, model files and the
//! `identify`, `verify`, `info` and `examples` commands.

pub mod commands;
pub mod dsl;
pub mod query;
pub mod trace;

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit code for an identifiable query or a successful command.
pub const EXIT_OK: i32 = 0;
/// Usage, parse or input errors.
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_IDENTIFIABLE: i32 = 2;
/// A verification trial exceeded its tolerance.
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "causal-id", version, about = "Identify causal effects in graphs with latent confounders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Latex,
    TraceJson,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive an estimand for P(s | do(t)) or report a witness
    Identify {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        query: String,
        #[arg(long, value_enum, default_value = "plain")]
        format: Format,
    },
    /// Check an estimand against brute force, or search for a negative
    /// uprooted-information model when there is none
    Verify {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Information measures of a model
    Info {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        model: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "")]
        e: String,
    },
    /// Print catalog graphs, queries, verdicts and certificate models
    Examples {
        #[arg(long, default_value = "all")]
        name: String,
        /// Write `<name>.graph` and model files here instead of stdout
        #[arg(long)]
        out_dir: Option<String>,
    },
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_ERROR
                }
            };
        }
    };
    let result = match cli.command {
        Command::Identify { graph, query, format } => commands::identify(&graph, &query, format, out),
        Command::Verify { graph, query, trials, seed, tolerance } => {
            commands::verify(&graph, &query, trials, seed, tolerance, out)
        }
        Command::Info { graph, model, b, a, e } => commands::info(&graph, &model, &b, &a, &e, out),
        Command::Examples { name, out_dir } => commands::examples(&name, out_dir.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

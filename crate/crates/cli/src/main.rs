//! `docelkit` command-line tool: convert OCEL logs to DOCEL bundles, generate
//! synthetic gold logs, and evaluate predictions against gold.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 output error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "docelkit", version, about = "Object-centric event log to DOCEL toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect dynamic attributes in an OCEL log and write a DOCEL bundle.
    Convert(ConvertArgs),
    /// Generate a gold DOCEL bundle for one of the two reference processes.
    Generate(GenerateArgs),
    /// Score a predicted DOCEL bundle against a gold bundle.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// JSON-OCEL file (.json/.jsonocel) or DOCEL bundle directory.
    input: Option<PathBuf>,
    /// Events table of a CSV rendering (use with --objects).
    #[arg(long, requires = "objects", conflicts_with = "input")]
    events: Option<PathBuf>,
    /// Objects table of a CSV rendering (use with --events).
    #[arg(long, requires = "events")]
    objects: Option<PathBuf>,
    /// Output bundle directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Flatten DOCEL input writing values only where they change.
    #[arg(long)]
    sparse: bool,
    /// Write the per-attribute detection report (JSON) here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print a JSON summary on stdout instead of text.
    #[arg(long)]
    json: bool,
    /// JSON config file; keys are the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DetectorArgs {
    /// Name-similarity margin.
    #[arg(long)]
    tau: Option<f64>,
    /// Attribute name never matched (repeatable; replaces the defaults).
    #[arg(long)]
    reserved: Vec<String>,
    /// Reserve nothing, not even the default resource attributes.
    #[arg(long, conflicts_with = "reserved")]
    no_reserved: bool,
    /// `lexical` or `embeddings:PATH`.
    #[arg(long)]
    similarity: Option<String>,
    /// Hidden-names mode: never break ties by name.
    #[arg(long)]
    no_name_matching: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Process {
    OrderToDelivery,
    ShippingMethod,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    process: Process,
    /// Output bundle directory for the gold DOCEL log.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the flattened log as JSON-OCEL here.
    #[arg(long)]
    ocel: Option<PathBuf>,
    #[arg(long)]
    orders: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Flatten writing values only where they change.
    #[arg(long)]
    sparse: bool,
    #[arg(long)]
    json: bool,
    /// JSON file with generator parameters (field names as in the params).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Both,
    PropagateFp,
    NoPropagateFp,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    gold: PathBuf,
    pred: PathBuf,
    /// Which assignment reports to compute.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Write the reports (JSON) here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Input(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Output(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Output(m) => m,
        }
    }
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
    let result = match cli.command {
        Command::Convert(a) => commands::convert(a),
        Command::Generate(a) => commands::generate(a),
        Command::Evaluate(a) => commands::evaluate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

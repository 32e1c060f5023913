//! `spaparse`: train, run and check the greedy transition parsers.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 failed
//! verification (oracle replay mismatches, gradient check failures).

mod config;
mod data;
mod eval;
mod gradcheck;
mod oracle;
mod parse;
mod train;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Precision, Task};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<spaparse::Error> for CliError {
    fn from(e: spaparse::Error) -> Self {
        match e {
            spaparse::Error::Config(m) => CliError::usage(m),
            other => CliError::data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "spaparse",
    version,
    about = "Greedy bi-LSTM transition parsers for dependencies and constituents"
)]
struct Cli {
    /// More log output on stderr (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a parser and write best-dev and final snapshots.
    Train(TrainArgs),
    /// Parse sentences with a trained model.
    Parse(ParseArgs),
    /// Score predicted trees against gold trees.
    Eval(EvalArgs),
    /// Dump gold action sequences, optionally checking that they replay.
    Oracle(OracleArgs),
    /// Finite-difference check of a small randomly initialized model.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Flat key=value settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// Training treebank: CoNLL for dep, bracketed trees for const.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Development treebank used to pick the best epoch.
    #[arg(long)]
    dev: Option<PathBuf>,
    /// Output directory for models, vocabulary and log.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Head rules for const training; the built-in English table otherwise.
    #[arg(long)]
    head_rules: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    hierarchical: Option<bool>,
    #[arg(long)]
    promote_cap: Option<usize>,
    #[arg(long, value_enum)]
    precision: Option<Precision>,
    /// Any other setting, as KEY=VALUE. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    /// CoNLL rows; head columns are ignored.
    Conll,
    /// One sentence per line of `word/TAG` tokens.
    Tagged,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[arg(long)]
    model: PathBuf,
    /// Expected task; a model for the other task is an error.
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// Input file; standard input when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Conll)]
    format: InputFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Vocabulary the model must have been trained with.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Sentence-level parallelism; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    task: Task,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Score punctuation tokens too (dep).
    #[arg(long)]
    include_punct: bool,
    /// Leave out each tree's top bracket (const).
    #[arg(long)]
    ignore_root: bool,
    /// Write arc recall by length as CSV (dep).
    #[arg(long)]
    recall_by_length: Option<PathBuf>,
    /// Arcs this long or longer share the last length bucket.
    #[arg(long, default_value_t = 10)]
    max_bucket: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    task: Task,
    /// Gold treebank: CoNLL for dep, bracketed trees for const.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    head_rules: Option<PathBuf>,
    /// Output file for the action sequences; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Replay every sequence and compare with the gold tree.
    #[arg(long)]
    replay: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GradcheckTask {
    Dep,
    Const,
    Both,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, value_enum, default_value_t = GradcheckTask::Both)]
    task: GradcheckTask,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    precision: Precision,
    /// Coordinates sampled per model.
    #[arg(long, default_value_t = 500)]
    coords: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest acceptable relative error; 1e-4 at f64 and 1e-2 at f32 by default.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Central-difference step, taken in 64-bit arithmetic. Default 1e-5.
    #[arg(long)]
    step: Option<f64>,
    /// Add DELTA to the analytic gradient of PARAM, to check that the
    /// fault is caught.
    #[arg(long, value_name = "PARAM[=DELTA]")]
    corrupt: Option<String>,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    init_logging(cli.verbose);
    let result = match cli.command {
        Command::Train(a) => train::run(a),
        Command::Parse(a) => parse::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Oracle(a) => oracle::run(a),
        Command::Gradcheck(a) => gradcheck::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

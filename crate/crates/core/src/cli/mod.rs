//! The `qlc` command line: ingest, generate, ask, grade, annotate, report.

mod commands;
mod workspace;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{
    cmd_annotate, cmd_ask, cmd_generate, cmd_grade, cmd_ingest, cmd_init, cmd_report, program_id, AnswerSource, AskOptions, Ingested,
};
pub use workspace::{read_json, write_json, AnswerFile, ProgramRecord, QlcFile, WorkspaceLayout};

use crate::harness::{RetryPolicy, SamplingParams, TOKEN_ENV};
use crate::parser::Origin;
use crate::tracer::DEFAULT_STEP_LIMIT;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("unknown task {0}; run init or add tasks/{0}.json")]
    UnknownTask(String),
    #[error("{0}")]
    MissingUpstream(String),
    #[error("{0}")]
    Invalid(String),
    #[error("model endpoint: {0}")]
    Backend(String),
    #[error("writing output: {0}")]
    Output(std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "qlc", version, about = "Generate questions about a learner's code and grade model answers to them")]
pub struct Cli {
    /// Workspace root holding tasks/, programs/, qlcs/, transcripts/, answers/, annotations/, reports/.
    #[arg(long, short = 'w', global = true, env = "QLC_WORKSPACE", default_value = ".")]
    pub workspace: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OriginArg {
    Llm,
    Manual,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create the workspace and write the bundled task descriptions.
    Init {
        /// Also ingest the bundled solutions.
        #[arg(long)]
        corpus: bool,
    },
    /// Filter candidate solutions and store the accepted ones.
    Ingest {
        #[arg(long)]
        task: String,
        #[arg(long, value_enum, default_value = "manual")]
        origin: OriginArg,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Generate one question of every supported type per program.
    Generate {
        #[arg(long)]
        task: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: u64,
    },
    /// Ask a model the generated questions, one session per program.
    #[command(after_help = format!("The bearer token is read from ${TOKEN_ENV}."))]
    Ask {
        #[arg(long)]
        model: String,
        /// Chat-completions base URL, e.g. https://host/v1.
        #[arg(long, required_unless_present = "replay")]
        base_url: Option<String>,
        /// Replay answers from a transcript file or directory instead.
        #[arg(long, conflicts_with = "base_url")]
        replay: Option<PathBuf>,
        #[arg(long)]
        task: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 1.0)]
        top_p: f64,
        #[arg(long, default_value_t = 0.0)]
        presence_penalty: f64,
        #[arg(long, default_value_t = 0.0)]
        frequency_penalty: f64,
        #[arg(long, default_value_t = 5)]
        max_attempts: u32,
        #[arg(long, default_value_t = 120)]
        timeout_secs: u64,
    },
    /// Grade every transcript into answers/.
    Grade {
        #[arg(long)]
        model: Option<String>,
    },
    /// Assign an error code to each incorrect answer, interactively.
    Annotate {
        #[arg(long)]
        rater: String,
        #[arg(long)]
        model: Option<String>,
    },
    /// Write success-rate and error-code reports.
    Report {
        /// Rater whose codes feed the error tables; defaults to the first rater per answer.
        #[arg(long)]
        rater: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Run a parsed command, writing progress to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let ws = WorkspaceLayout::new(cli.workspace);
    match cli.command {
        Command::Init { corpus } => cmd_init(&ws, corpus, out),
        Command::Ingest { task, origin, paths } => {
            let origin = match origin {
                OriginArg::Llm => Origin::Llm,
                OriginArg::Manual => Origin::Manual,
            };
            cmd_ingest(&ws, &task, &paths, origin, out).map(drop)
        }
        Command::Generate { task, seed, step_limit } => cmd_generate(&ws, task.as_deref(), seed, step_limit, out).map(drop),
        Command::Ask {
            model,
            base_url,
            replay,
            task,
            temperature,
            top_p,
            presence_penalty,
            frequency_penalty,
            max_attempts,
            timeout_secs,
        } => {
            let source = match (replay, base_url) {
                (Some(p), _) => AnswerSource::Replay(p),
                (None, Some(base_url)) => AnswerSource::Http { base_url },
                (None, None) => return Err(CliError::Invalid("either --base-url or --replay is required".into())),
            };
            let opts = AskOptions {
                model,
                source,
                params: SamplingParams {
                    temperature,
                    top_p,
                    presence_penalty,
                    frequency_penalty,
                },
                task,
                retry: RetryPolicy {
                    max_attempts: max_attempts.max(1),
                    ..RetryPolicy::default()
                },
                timeout: Duration::from_secs(timeout_secs),
            };
            cmd_ask(&ws, &opts, out).map(drop)
        }
        Command::Grade { model } => cmd_grade(&ws, model.as_deref(), out).map(drop),
        Command::Annotate { rater, model } => {
            let stdin = std::io::stdin();
            cmd_annotate(&ws, &rater, model.as_deref(), &mut stdin.lock(), out).map(drop)
        }
        Command::Report { rater, out_dir } => cmd_report(&ws, rater.as_deref(), out_dir.as_deref(), out).map(drop),
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! `mdqec`: correctability, recovery and multiplicative-domain analysis of
//! quantum channels given as Kraus operators.
//!
//! Exit codes: 0 for a positive answer, 2 for a computed negative answer
//! (not correctable, not unitarily correctable), 1 for errors and failed
//! certificates.

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdqec::algebra::AlgebraError;
use mdqec::channel::ChannelError;
use mdqec::codes::CodeError;
use mdqec::mdomain::MdError;
use mdqec::numerics::{NumericsError, Tolerance};
use thiserror::Error;

use commands::{AlgebraChoice, CodeSource, CodeSpec, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error in {file} at line {line}, column {column}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Md(#[from] MdError),
}

#[derive(Debug, Parser)]
#[command(name = "mdqec", version, about = "Correctable codes and multiplicative domains of quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Absolute and relative-rank tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the randomised algebra decompositions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Args)]
struct ChannelArg {
    /// Channel file: {"dim": n, "kraus": [[[re, im], ...], ...]}.
    #[arg(long)]
    channel: PathBuf,
}

#[derive(Debug, Args)]
#[group(id = "code", multiple = false)]
struct CodeArgs {
    /// Projector file onto the code (nested [re, im] rows).
    #[arg(long, group = "code")]
    projector: Option<PathBuf>,
    /// Isometry file whose columns span the code in A ⊗ B order.
    #[arg(long, group = "code")]
    isometry: Option<PathBuf>,
    /// Standard basis indices spanning the code, in A ⊗ B order.
    #[arg(long, group = "code", value_delimiter = ',')]
    basis_indices: Option<Vec<usize>>,
    /// Factorisation of the code as A,B (default 1,dim C).
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize)>,
}

impl CodeArgs {
    fn spec(&self) -> Option<CodeSpec> {
        let source = if let Some(p) = &self.projector {
            CodeSource::Projector(p.clone())
        } else if let Some(p) = &self.isometry {
            CodeSource::Isometry(p.clone())
        } else {
            CodeSource::Indices(self.basis_indices.clone()?)
        };
        Some(CodeSpec { source, dims: self.dims })
    }

    fn required(&self) -> Result<CodeSpec, CliError> {
        self.spec().ok_or_else(|| {
            CliError::InvalidInput("a code is required: --projector, --isometry or --basis-indices".into())
        })
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgebraArg {
    /// Multiplicative domain of the channel.
    Md,
    /// Commutant of the error products (unital channels).
    Ucc,
    /// Algebra generated by the Kraus operators.
    Errors,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check trace preservation and report unitality.
    Validate {
        #[command(flatten)]
        channel: ChannelArg,
    },
    /// Knill-Laflamme test for a code.
    Kl {
        #[command(flatten)]
        channel: ChannelArg,
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Correction rank of a correctable code.
    Rank {
        #[command(flatten)]
        channel: ChannelArg,
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Correction normal form and certified recovery channel.
    Recover {
        #[command(flatten)]
        channel: ChannelArg,
        #[command(flatten)]
        code: CodeArgs,
        /// Write the recovery channel to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Multiplicative domain and its block structure.
    Md {
        #[command(flatten)]
        channel: ChannelArg,
    },
    /// Verify a unitarily correctable code, or extract them from the multiplicative domain.
    Ucc {
        #[command(flatten)]
        channel: ChannelArg,
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Compare the four algebras that coincide for unital channels.
    FourCheck {
        #[command(flatten)]
        channel: ChannelArg,
    },
    /// Block structure of an algebra attached to the channel.
    Decompose {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long, value_enum, default_value = "md")]
        algebra: AlgebraArg,
    },
    /// Run the built-in reference checks.
    PaperExamples,
}

fn run(command: &Command, set: &Settings) -> Result<report::Report, CliError> {
    match command {
        Command::Validate { channel } => commands::validate(&channel.channel, set),
        Command::Kl { channel, code } => commands::kl(&channel.channel, &code.required()?, set),
        Command::Rank { channel, code } => commands::rank(&channel.channel, &code.required()?, set),
        Command::Recover { channel, code, output } => {
            commands::recover(&channel.channel, &code.required()?, output.as_deref(), set)
        }
        Command::Md { channel } => commands::md(&channel.channel, set),
        Command::Ucc { channel, code } => commands::ucc(&channel.channel, code.spec().as_ref(), set),
        Command::FourCheck { channel } => commands::four_check(&channel.channel, set),
        Command::Decompose { channel, algebra } => {
            let choice = match algebra {
                AlgebraArg::Md => AlgebraChoice::Md,
                AlgebraArg::Ucc => AlgebraChoice::Ucc,
                AlgebraArg::Errors => AlgebraChoice::Errors,
            };
            commands::decompose(&channel.channel, choice, set)
        }
        Command::PaperExamples => Ok(commands::paper_examples(set)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match cli.common.tol {
        Some(t) => match Tolerance::new(t, t) {
            Ok(tol) => tol,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => Tolerance::default(),
    };
    let set = Settings {
        tol,
        seed: cli.common.seed,
    };
    match run(&cli.command, &set) {
        Ok(report) => {
            if cli.common.json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

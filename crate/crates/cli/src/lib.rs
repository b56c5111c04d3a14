//! Command-line front-end: `synth`, `score`, `aggregate`, `evaluate` and
//! `pipeline` subcommands over a shared TOML config.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;

use clap::{CommandFactory, Parser, Subcommand};

use crate::config::{CommonArgs, PipelineConfig};
use crate::error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "instrank", version, about = "Score, aggregate and evaluate institution rankings")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with planted institution strengths.
    Synth {
        /// Overrides `synth.rng_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score every venue and year into `scores_<venue>_<year>.csv`.
    Score,
    /// Aggregate training years into `ranking_<venue>_<method>.csv`.
    Aggregate,
    /// Compare stored rankings against the truth year with NDCG@k.
    Evaluate,
    /// Score, aggregate, evaluate and predict the following year.
    Pipeline,
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut config = PipelineConfig::from_args(&cli.common)?;
    match &cli.command {
        Command::Synth { seed } => {
            if let Some(seed) = seed {
                config.synth.rng_seed = *seed;
            }
            for path in commands::cmd_synth(&config)? {
                println!("{}", path.display());
            }
        }
        Command::Score => {
            let summary = commands::cmd_score(&config)?;
            for line in &summary.lines {
                eprintln!("{line}");
            }
            for path in &summary.files {
                println!("{}", path.display());
            }
        }
        Command::Aggregate => {
            for path in commands::cmd_aggregate(&config)? {
                println!("{}", path.display());
            }
        }
        Command::Evaluate => print!("{}", commands::cmd_evaluate(&config)?.report.render_text()),
        Command::Pipeline => {
            let evaluation = commands::cmd_pipeline(&config)?;
            print!("{}", evaluation.report.render_text());
            for (venue, best) in &evaluation.winners {
                println!("{venue}: {}", config.methods[*best]);
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if code == exit::CONFIG {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            code
        }
    }
}

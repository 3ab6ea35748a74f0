//! `orbitmap <command> --config <file> [--seed N] [--out DIR]`
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 on usage
//! or input errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::table::Scale;
use commands::verify::Check;
use config::ExperimentConfig;
use orbitmap::shapes::{InputFormat, ShapeFamily};
use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "orbitmap", version, about = "Low-distortion embeddings of orbit spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: the configured `out`, else ./out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Empirical distortion of reference, stored or random-bank models on a
    /// fresh Gaussian test set.
    Distortion,
    /// Trains the configured architecture and reports held-out distortion.
    Train,
    /// Regenerates one of the distortion tables at a reduced scale.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(2..=7))]
        id: u8,
        #[arg(long, value_enum, default_value_t = Scale::Desk)]
        scale: Scale,
    },
    /// Runs a numerical check and writes a JSON certificate.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
    /// Polygon pipeline.
    Shapes {
        #[command(subcommand)]
        command: ShapesCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ShapesCommand {
    /// Reads polygons and resamples them to `shapes.k` boundary points.
    Ingest {
        input: PathBuf,
        #[arg(long, value_parser = parse_format)]
        format: Option<InputFormat>,
    },
    /// Writes a deterministic synthetic dataset.
    Synth {
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// One family only [default: all three, interleaved].
        #[arg(long, value_parser = parse_family)]
        family: Option<ShapeFamily>,
    },
    /// Embeds resampled shapes with `model_file`, or trains a model first.
    Embed { input: PathBuf },
    /// PCA of an embeddings CSV, as CSV and SVG.
    Pca {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        dims: usize,
    },
}

fn parse_format(s: &str) -> Result<InputFormat, String> {
    s.parse().map_err(|e: orbitmap::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<ShapeFamily, String> {
    s.parse().map_err(|e: orbitmap::Error| e.to_string())
}

/// Whether a command's checks held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    CheckFailed,
}

/// Everything a command needs.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub seed: u64,
    pub out: OutDir,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out_path = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Context { seed: cfg.seed, out: OutDir::create(&out_path)?, cfg };
    match cli.command {
        Command::Distortion => commands::distortion::run(&ctx),
        Command::Train => commands::train::run(&ctx),
        Command::Table { id, scale } => commands::table::run(&ctx, id, scale),
        Command::Verify { check } => commands::verify::run(&ctx, check),
        Command::Shapes { command } => commands::shapes::run(&ctx, command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

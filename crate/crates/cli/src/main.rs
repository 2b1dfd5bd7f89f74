//! `comfort`: synthesize trips, detect discomfort, train and evaluate the
//! comfort predictor, and rate trips.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use comfort_core::pipeline::DetectorKind;

mod commands;
mod config;

use config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(name = "comfort", version, about = "Commuter comfort inference from trip sensor streams")]
struct Cli {
    /// Base seed; overrides both the pipeline and the training seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML pipeline config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Anomaly detector; overrides the config file.
    #[arg(long, global = true, value_parser = parse_detector)]
    detector: Option<DetectorKind>,
    /// Output directory; defaults to the matching directory from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render synthetic trips from a scenario file or the configured population.
    Synth {
        #[arg(long, conflicts_with = "population")]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Generate the multi-commuter population from the config instead.
        #[arg(long)]
        population: bool,
    },
    /// Per-window features as CSV.
    Extract {
        /// Trip files or directories of them.
        #[arg(required = true)]
        trips: Vec<PathBuf>,
    },
    /// Per-window discomfort likelihoods.
    Detect {
        #[arg(required = true)]
        trips: Vec<PathBuf>,
    },
    /// Train the comfort model on labelled trips.
    Train {
        /// Directory of labelled trips; defaults to the config's trips dir.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Warm start from an existing checkpoint.
        #[arg(long)]
        init: Option<PathBuf>,
        /// Feedback queue whose answered queries join the training data.
        #[arg(long)]
        queue: Option<PathBuf>,
        /// Train a single-task model for this commuter only.
        #[arg(long)]
        stl: Option<String>,
    },
    /// Predict comfort for one trip.
    Run {
        trip: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Feedback queue to append ambiguous windows to.
        #[arg(long)]
        queue: Option<PathBuf>,
        /// Answer queued queries from the trip's own labels.
        #[arg(long, requires = "queue")]
        answer: bool,
    },
    /// Score a model on the held-out trips.
    Eval {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Score the label oracle instead of a model.
        #[arg(long, conflicts_with = "model")]
        oracle: bool,
    },
    /// Trip ratings as `trip_id=rating` lines.
    Rate {
        #[arg(required = true)]
        trips: Vec<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn parse_detector(s: &str) -> Result<DetectorKind, String> {
    s.parse().map_err(|e: comfort_core::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        cfg.train.seed = seed;
    }
    if let Some(d) = cli.detector {
        cfg.detection.detector = d;
    }
    cfg.validate()?;
    let out = cli.out;
    match cli.command {
        Command::Synth { scenario, count, population } => {
            let out = out.unwrap_or_else(|| cfg.paths.trips_dir.clone());
            commands::synth(&cfg, scenario.as_deref(), count, population, &out)
        }
        Command::Extract { trips } => {
            let out = out.unwrap_or_else(|| cfg.paths.reports_dir.clone());
            commands::extract(&cfg, &trips, &out)
        }
        Command::Detect { trips } => {
            let out = out.unwrap_or_else(|| cfg.paths.reports_dir.clone());
            commands::detect(&cfg, &trips, &out)
        }
        Command::Train { data, init, queue, stl } => {
            let data = data.unwrap_or_else(|| cfg.paths.trips_dir.clone());
            let out = out.unwrap_or_else(|| cfg.paths.models_dir.clone());
            commands::train(&cfg, &data, init.as_deref(), queue.as_deref(), stl.as_deref(), &out)
        }
        Command::Run { trip, model, queue, answer } => {
            let model = model.unwrap_or_else(|| commands::default_model(&cfg));
            let out = out.unwrap_or_else(|| cfg.paths.reports_dir.clone());
            commands::run_trip(&cfg, &trip, &model, queue.as_deref(), answer, &out)
        }
        Command::Eval { data, model, oracle } => {
            let data = data.unwrap_or_else(|| cfg.paths.trips_dir.clone());
            let model = if oracle { None } else { Some(model.unwrap_or_else(|| commands::default_model(&cfg))) };
            let out = out.unwrap_or_else(|| cfg.paths.reports_dir.clone());
            commands::eval(&cfg, &data, model.as_deref(), &out)
        }
        Command::Rate { trips, model } => {
            let model = model.unwrap_or_else(|| commands::default_model(&cfg));
            let out = out.unwrap_or_else(|| cfg.paths.reports_dir.clone());
            commands::rate(&cfg, &trips, &model, &out)
        }
    }
}

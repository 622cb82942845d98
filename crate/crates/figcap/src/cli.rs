//! Command-line interface: argument parsing, configuration resolution, and
//! dispatch. Flags override `FIGCAP_*` environment variables, which override
//! the TOML file, which overrides built-in defaults.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::refine::{RefineArgs, RefineMode};
use crate::commands::score::ScoreArgs;
use crate::commands::{fuse, ingest, rank, refine, report, score};
use crate::config::RunConfig;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "figcap",
    version,
    about = "Figure-caption pipeline: ingest corpora, refine paragraphs, \
             score captions, fuse model outputs, and rank candidates"
)]
pub struct Cli {
    /// Score normalizer: `identity` or `length-ratio`.
    #[arg(long, global = true, value_name = "NAME")]
    normalizer: Option<String>,

    /// N-gram order for ranking and fusion metrics.
    #[arg(long, global = true, value_name = "N")]
    metric_n: Option<usize>,

    /// Worker threads; 0 keeps the default pool size.
    #[arg(long, global = true, value_name = "COUNT")]
    jobs: Option<usize>,

    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a corpus file and print coverage statistics.
    Ingest {
        /// Corpus file, one record per line.
        input: PathBuf,
    },

    /// Refine paragraphs toward each record's most-mentioned figure.
    Refine {
        /// Corpus file, one record per line.
        input: PathBuf,
        /// Output path; `-` writes to stdout.
        #[arg(short, long, default_value = "-")]
        output: String,
        /// Refinement backend.
        #[arg(long, default_value = "rule", value_parser = ["rule", "external"])]
        mode: String,
        /// Also write assembled generation inputs to this path.
        #[arg(long, value_name = "PATH")]
        assemble: Option<String>,
        /// Character budget for refined paragraphs.
        #[arg(long, value_name = "CHARS")]
        char_budget: Option<usize>,
        /// Token budget for assembled inputs.
        #[arg(long, value_name = "TOKENS")]
        token_budget: Option<usize>,
        /// OCR merge policy: `prefer-alt`, `prefer-official`, or `union`.
        #[arg(long, value_name = "POLICY")]
        merge_policy: Option<String>,
        /// Chat-completion endpoint for external mode.
        #[arg(long, value_name = "URL")]
        endpoint: Option<String>,
        /// Model name sent to the endpoint.
        #[arg(long, value_name = "NAME")]
        model: Option<String>,
        /// Request timeout in seconds.
        #[arg(long, value_name = "SECS")]
        timeout_secs: Option<u64>,
        /// Environment variable holding the bearer token.
        #[arg(long, value_name = "VAR")]
        auth_env: Option<String>,
        /// Maximum concurrent endpoint requests.
        #[arg(long, value_name = "COUNT")]
        max_in_flight: Option<usize>,
    },

    /// Score predicted captions against reference captions.
    Score {
        /// Predicted captions, one record per line.
        predictions: PathBuf,
        /// Reference captions covering every predicted id.
        references: PathBuf,
        /// Row label in the rendered table.
        #[arg(long, default_value = "base")]
        label: String,
        /// Also write the JSON report to this path.
        #[arg(long, value_name = "PATH")]
        json: Option<String>,
    },

    /// Select consensus captions across parallel model output files.
    Fuse {
        /// One caption file per model; the first defines output order.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output path; `-` writes to stdout.
        #[arg(short, long, default_value = "-")]
        output: String,
    },

    /// Compute contrastive ranking losses for candidate sets.
    Rank {
        /// Candidate sets with per-token log-probabilities.
        input: PathBuf,
        /// Output path; `-` writes to stdout.
        #[arg(short, long, default_value = "-")]
        output: String,
        /// Length-normalization exponent.
        #[arg(long)]
        alpha: Option<f64>,
        /// Margin per rank step.
        #[arg(long)]
        lambda: Option<f64>,
        /// Contrastive loss weight.
        #[arg(long)]
        gamma: Option<f64>,
    },

    /// Render score reports side by side as one table.
    Report {
        /// Score report files, one table row per report.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

/// Parses arguments, runs the selected command, and returns the process
/// exit code: 0 on success, 1 for IO or endpoint failures, 2 for invalid
/// input or configuration.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    if let Some(raw) = &cli.normalizer {
        config.normalizer = raw.parse()?;
    }
    if let Some(n) = cli.metric_n {
        config.metric_n = n;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    apply_command_overrides(&cli.command, &mut config)?;
    config.validate()?;
    config.echo();
    if config.jobs > 0 {
        // Ignore the error: the global pool can already be set in-process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build_global();
    }

    match cli.command {
        Command::Ingest { input } => ingest::run(&input),
        Command::Refine {
            input,
            output,
            mode,
            assemble,
            ..
        } => {
            let mode = match mode.as_str() {
                "external" => RefineMode::External,
                _ => RefineMode::Rule,
            };
            refine::run(
                &config,
                &RefineArgs {
                    input,
                    output,
                    mode,
                    assemble,
                },
            )
        }
        Command::Score {
            predictions,
            references,
            label,
            json,
        } => score::run(
            &config,
            &ScoreArgs {
                predictions,
                references,
                label,
                json,
            },
        ),
        Command::Fuse { inputs, output } => {
            fuse::run(&config, &fuse::FuseArgs { inputs, output })
        }
        Command::Rank { input, output, .. } => {
            rank::run(&config, &rank::RankArgs { input, output })
        }
        Command::Report { inputs } => report::run(&inputs),
    }
}

fn apply_command_overrides(command: &Command, config: &mut RunConfig) -> Result<()> {
    match command {
        Command::Refine {
            char_budget,
            token_budget,
            merge_policy,
            endpoint,
            model,
            timeout_secs,
            auth_env,
            max_in_flight,
            ..
        } => {
            if let Some(v) = char_budget {
                config.char_budget = *v;
            }
            if let Some(v) = token_budget {
                config.token_budget = *v;
            }
            if let Some(raw) = merge_policy {
                config.merge_policy = raw.parse()?;
            }
            if let Some(v) = endpoint {
                config.refiner.endpoint = Some(v.clone());
            }
            if let Some(v) = model {
                config.refiner.model = v.clone();
            }
            if let Some(v) = timeout_secs {
                config.refiner.timeout_secs = *v;
            }
            if let Some(v) = auth_env {
                config.refiner.auth_env = v.clone();
            }
            if let Some(v) = max_in_flight {
                config.refiner.max_in_flight = *v;
            }
        }
        Command::Rank {
            alpha,
            lambda,
            gamma,
            ..
        } => {
            if let Some(v) = alpha {
                config.alpha = *v;
            }
            if let Some(v) = lambda {
                config.lambda = *v;
            }
            if let Some(v) = gamma {
                config.gamma = *v;
            }
        }
        _ => {}
    }
    Ok(())
}

//! `sphere-sync`: graph generation, spectral verification, simulation and
//! rate fitting for sphere-valued synchronization on digraphs.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

mod commands;
mod config;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use sphere_sync::graph::{Family, GraphError, GraphParams, WeightSpec};
use sphere_sync::spectra::SpectrumMethod;
use thiserror::Error;

use commands::{Outcome, VerifyItem};
use config::ExperimentConfig;
use summary::Map;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {msg}")]
    Config { field: String, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {source}")]
    Graph { origin: String, source: GraphError },
    #[error("{0}")]
    Usage(String),
    /// The input was valid but the computation could not complete.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn failed(e: impl std::fmt::Display) -> Self {
        CliError::Failed(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sphere-sync", version, about = "Synchronization of unit vectors on digraphs")]
struct Cli {
    /// Seed for random graphs and initial states; overrides `sim.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Residual tolerance for spectral checks.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,

    /// Suppress the summary on stdout.
    #[arg(long, short, global = true)]
    quiet: bool,

    /// Omit the timestamp from summaries, making them byte-reproducible.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Emit summaries as JSON instead of indented text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Float,
    Exact,
    Auto,
}

impl From<Method> for SpectrumMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Float => SpectrumMethod::Float,
            Method::Exact => SpectrumMethod::Exact,
            Method::Auto => SpectrumMethod::Auto,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a named graph family as an edge list.
    Generate {
        /// complete, directed_cycle, star_out, directed_path,
        /// random_spanning_tree_plus_edges or disconnected_pair.
        family: String,
        m: usize,
        /// Output file; the edge list goes to stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// `unit` or `uniform LO HI`.
        #[arg(long, default_value = "unit")]
        weights: String,
        /// Probability of each extra edge in the random family.
        #[arg(long)]
        extra_edge_prob: Option<f64>,
    },
    /// Laplacian eigenvalues, rank, spanning-tree verdict and λ₂.
    Spectrum {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "float")]
        method: Method,
    },
    /// Check the predicted spectra and block structure of the linearized error operator.
    Verify {
        /// Edge-list file; omit when using --random.
        graph: Option<PathBuf>,
        /// Number of random spanning-tree graphs to check.
        #[arg(long, conflicts_with = "graph")]
        random: Option<usize>,
        /// Largest node count for --random.
        #[arg(long, default_value_t = 6)]
        mmax: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Integrate the sphere and error flows; write the trajectory CSV.
    Simulate {
        config: PathBuf,
        /// Largest allowed sphere-vs-error-flow discrepancy.
        #[arg(long, default_value_t = 1e-5)]
        cross_tol: f64,
    },
    /// Fit the synchronization rate and compare it with Re λ₂.
    Rate {
        config: PathBuf,
        /// Largest allowed relative error of either fitted rate.
        #[arg(long, default_value_t = 0.05)]
        max_rel_error: f64,
    },
}

fn parse_weights(s: &str) -> Result<WeightSpec, CliError> {
    config::parse_weights(s).map_err(|e| match e {
        CliError::Config { msg, .. } => CliError::Usage(format!("--weights: {msg}")),
        other => other,
    })
}

fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>, Option<String>), CliError> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Generate {
            family,
            m,
            out,
            weights,
            extra_edge_prob,
        } => {
            let family: Family = family.parse().map_err(|e: GraphError| CliError::Usage(e.to_string()))?;
            let mut params = GraphParams::seeded(seed);
            params.weights = parse_weights(weights)?;
            if let Some(p) = extra_edge_prob {
                if !(0.0..=1.0).contains(p) {
                    return Err(CliError::Usage(format!("--extra-edge-prob: expected a probability, got {p}")));
                }
                params.extra_edge_prob = *p;
            }
            let (outcome, text) = commands::cmd_generate(family, *m, &params, out.as_deref())?;
            // without --out the edge list itself is the output
            let raw = out.is_none().then_some(text);
            Ok((outcome, None, raw))
        }
        Command::Spectrum { graph, method } => Ok((commands::cmd_spectrum(graph, (*method).into())?, None, None)),
        Command::Verify {
            graph,
            random,
            mmax,
            method,
        } => {
            let items = match (graph, random) {
                (Some(path), None) => vec![VerifyItem {
                    source: path.display().to_string(),
                    seed: None,
                    graph: Ok(commands::load_graph(path)?),
                }],
                (None, Some(count)) => {
                    if *mmax < 2 {
                        return Err(CliError::Usage(format!("--mmax must be at least 2, got {mmax}")));
                    }
                    commands::random_batch(*count, *mmax, seed)
                }
                _ => return Err(CliError::Usage("verify needs a graph file or --random COUNT".into())),
            };
            if !(cli.tol > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
            }
            Ok((commands::cmd_verify(&items, cli.tol, (*method).into()), None, None))
        }
        Command::Simulate { config, cross_tol } => {
            let cfg = ExperimentConfig::load(config)?;
            let seed = cli.seed.or(cfg.seed).unwrap_or(0);
            Ok((commands::cmd_simulate(&cfg, seed, *cross_tol)?, cfg.summary.clone(), None))
        }
        Command::Rate { config, max_rel_error } => {
            let cfg = ExperimentConfig::load(config)?;
            let seed = cli.seed.or(cfg.seed).unwrap_or(0);
            Ok((commands::cmd_rate(&cfg, seed, *max_rel_error)?, cfg.summary.clone(), None))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Generate { .. } => "generate",
        Command::Spectrum { .. } => "spectrum",
        Command::Verify { .. } => "verify",
        Command::Simulate { .. } => "simulate",
        Command::Rate { .. } => "rate",
    }
}

fn render(cli: &Cli, outcome: Outcome) -> String {
    let mut doc = Map::new().with("command", command_name(&cli.command));
    if !cli.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        doc.insert("timestamp", secs);
    }
    doc.insert("status", if outcome.passed { "ok" } else { "failed" });
    let mut merged = doc;
    for (k, v) in outcome.doc.into_entries() {
        merged.insert(&k, v);
    }
    if cli.json {
        let mut s = serde_json::to_string_pretty(&merged.to_json()).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        merged.to_text()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, summary_file, raw)) => {
            let passed = outcome.passed;
            let text = render(&cli, outcome);
            if let Some(raw) = raw {
                print!("{raw}");
            } else if !cli.quiet {
                print!("{text}");
            }
            if let Some(p) = summary_file {
                if let Err(e) = std::fs::write(&p, &text) {
                    eprintln!("error: {}: {e}", p.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

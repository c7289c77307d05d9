//! `paremio`: proverb frequency pipelines over corpus manifests.
//!
//! Exit codes: 0 success, 1 data error (including partial corpus failure),
//! 2 configuration error.

mod commands;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paremio_core::network::{NodeKind, DEFAULT_MAX_NODES};
use paremio_core::timeseries::CountingMode;
use paremio_core::zipf::{RankRange, TieBreak};
use paremio_core::BinScheme;

#[derive(Parser)]
#[command(name = "paremio", version, about = "Proverb frequency analysis over text corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a lexicon and report entries, collisions and length histogram.
    LexiconCheck(LexiconArgs),
    /// Scan a corpus and write the match table.
    Match(MatchArgs),
    /// Binned, normalized and smoothed frequency series.
    Timeseries(TimeseriesArgs),
    /// Rank-frequency table and power-law fit.
    Zipf(ZipfArgs),
    /// Shared-proverb network and betweenness ranking.
    Network(NetworkArgs),
    /// Run match, timeseries, zipf and network in one go.
    Report(ReportArgs),
    /// Rewrite year-tuple n-gram files as one year per line.
    FlattenNgrams(FlattenArgs),
}

#[derive(Args, Clone)]
pub struct LexiconArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// File of phrases to mark as proverbial expressions.
    #[arg(long)]
    pub expressions: Option<PathBuf>,
    /// Drop entries categorized as proverbial expressions.
    #[arg(long)]
    pub exclude_expressions: bool,
    /// Split hyphenated words instead of joining them.
    #[arg(long)]
    pub split_hyphens: bool,
}

#[derive(Args, Clone)]
pub struct MatchArgs {
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    /// Corpus manifest (TOML).
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Scan threads; defaults to the number of cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Phrase length for n-gram corpora; inferred from the data if omitted.
    #[arg(long)]
    pub ngram_length: Option<usize>,
    #[arg(long, env = "PAREMIO_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct SeriesOpts {
    /// day | month | year | <k>y; defaults by corpus kind.
    #[arg(long)]
    pub bin: Option<BinScheme>,
    /// Rolling-average window in bins.
    #[arg(long, default_value_t = 1)]
    pub window: usize,
    /// occurrences | presence
    #[arg(long, default_value = "occurrences")]
    pub mode: CountingMode,
    /// First key the bins must cover (YYYY or YYYY-MM-DD).
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
}

#[derive(Args, Clone)]
pub struct TimeseriesArgs {
    #[command(flatten)]
    pub scan: MatchArgs,
    #[command(flatten)]
    pub series: SeriesOpts,
}

#[derive(Args, Clone)]
pub struct ZipfOpts {
    /// Inclusive rank range A:B; defaults to every rank.
    #[arg(long)]
    pub fit_range: Option<RankRange>,
    /// Tie order for equal frequencies: text | input
    #[arg(long, default_value = "text", value_parser = parse_ties)]
    pub ties: TieBreak,
}

#[derive(Args, Clone)]
pub struct ZipfArgs {
    /// Ranked `proverb<TAB>count` file instead of a corpus scan.
    #[arg(long, conflicts_with_all = ["lexicon", "corpus"])]
    pub counts: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub expressions: Option<PathBuf>,
    #[arg(long)]
    pub exclude_expressions: bool,
    #[arg(long)]
    pub split_hyphens: bool,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub ngram_length: Option<usize>,
    #[arg(long, env = "PAREMIO_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Rank by occurrences or by document presence.
    #[arg(long, default_value = "occurrences")]
    pub mode: CountingMode,
    #[command(flatten)]
    pub zipf: ZipfOpts,
}

#[derive(Args, Clone)]
pub struct NetworkOpts {
    /// document | author
    #[arg(long, default_value = "document")]
    pub node_kind: NodeKind,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Divide scores by the number of node pairs excluding the node.
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
}

#[derive(Args, Clone)]
pub struct NetworkArgs {
    #[command(flatten)]
    pub scan: MatchArgs,
    #[command(flatten)]
    pub network: NetworkOpts,
}

#[derive(Args, Clone)]
pub struct ReportArgs {
    #[command(flatten)]
    pub scan: MatchArgs,
    #[command(flatten)]
    pub series: SeriesOpts,
    #[command(flatten)]
    pub zipf: ZipfOpts,
    #[command(flatten)]
    pub network: NetworkOpts,
}

#[derive(Args, Clone)]
pub struct FlattenArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

fn parse_ties(s: &str) -> Result<TieBreak, String> {
    s.parse().map_err(|e: paremio_core::Error| e.to_string())
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Data(anyhow::Error),
}

impl Failure {
    pub fn config(e: impl Into<anyhow::Error>) -> Self {
        Failure::Config(e.into())
    }
}

impl From<paremio_core::Error> for Failure {
    fn from(e: paremio_core::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.into())
        } else {
            Failure::Data(e.into())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::LexiconCheck(a) => commands::lexicon_check(&a),
        Command::Match(a) => commands::run_match(&a),
        Command::Timeseries(a) => commands::run_timeseries(&a),
        Command::Zipf(a) => commands::run_zipf(&a),
        Command::Network(a) => commands::run_network(&a),
        Command::Report(a) => commands::run_report(&a),
        Command::FlattenNgrams(a) => commands::flatten(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            log::error!("{e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            log::error!("{e:#}");
            ExitCode::from(2)
        }
    }
}

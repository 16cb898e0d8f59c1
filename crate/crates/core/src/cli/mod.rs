//! Command-line driver: `index`, `rank`, `rerank`, `eval` and `sweep`.
//!
//! Every subcommand also accepts `--config FILE`, a flat `key = value` file
//! whose keys are long flag names. Flags given on the command line win.

mod commands;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

/// Exit codes.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_ILLEGAL_ALGORITHM: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "clustrank",
    version,
    about = "Structural re-ranking with cluster-document centrality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize a TREC corpus and write an index.
    Index(IndexArgs),
    /// Rank the whole index by query likelihood (top 1000 per query).
    Rank(RankArgs),
    /// Re-rank the top of an initial run.
    Rerank(RerankArgs),
    /// Score runs against relevance judgments.
    Eval(EvalArgs),
    /// Evaluate an algorithm over its parameter grid and pick a setting.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat key=value file of flag defaults.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// TREC file or directory of TREC files.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Index file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// File with one stopword per line.
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Disable Porter stemming.
    #[arg(long)]
    pub no_stem: bool,
    /// Also index <HEAD> and <HL> blocks.
    #[arg(long)]
    pub headlines: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Topics file: query_id<TAB>text per line.
    #[arg(long)]
    pub topics: PathBuf,
    /// Run file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Dirichlet smoothing parameter.
    #[arg(long, default_value_t = 1000.0)]
    pub mu: f64,
    /// Documents retrieved per query.
    #[arg(long, default_value_t = 1000)]
    pub depth: usize,
    /// Choose mu from --mu-grid by this metric instead (p5, p10, mrr, ap).
    #[arg(long, value_name = "METRIC", requires = "qrels")]
    pub tune: Option<String>,
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    /// Comma-separated mu values for --tune.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "100,500,1000,2000,3000,5000,8000"
    )]
    pub mu_grid: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone)]
pub struct SpecArgs {
    /// Initial run to re-rank.
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub index: PathBuf,
    /// Topics file; needed for --score ql and to recompute likelihoods with --mu.
    #[arg(long)]
    pub topics: Option<PathBuf>,
    /// Documents taken from the top of each initial ranking.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Dirichlet parameter of the language models behind edge weights.
    #[arg(long, default_value_t = 2000.0)]
    pub mu_edges: f64,
    /// Dirichlet parameter of the initial ranking, for re-anchoring likelihoods.
    /// Without it the initial run's scores are taken as log likelihoods.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Graph out-degree.
    #[arg(long, default_value_t = 9)]
    pub delta: usize,
    /// Cluster size.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// PageRank damping factor.
    #[arg(long, default_value_t = 0.85)]
    pub lambda: f64,
    /// Graph: dd, cd or dc.
    #[arg(long, default_value = "cd")]
    pub graph: String,
    /// Score: auth, hub, pr, prbip, influx or ql.
    #[arg(long, default_value = "auth")]
    pub score: String,
    /// Ranking mode: doc or clust.
    #[arg(long, default_value = "doc")]
    pub mode: String,
    /// Multiply document scores by query likelihood.
    #[arg(long)]
    pub reanchor: bool,
    /// Interpolate edge weights with the uniform distribution.
    #[arg(long)]
    pub smooth_lambda: Option<f64>,
    /// Tie policy: id or initial.
    #[arg(long, default_value = "id")]
    pub tie: String,
}

#[derive(Debug, Args)]
pub struct RerankArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Run file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// In clust mode, write each query's top-ranked cluster here.
    #[arg(long, value_name = "FILE")]
    pub top_clusters_out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub qrels: PathBuf,
    /// Run file; repeat to compare several.
    #[arg(long, required = true)]
    pub run: Vec<PathBuf>,
    /// Top-cluster file from `rerank --top-clusters-out`, one per --run in the same order.
    #[arg(long)]
    pub top_clusters: Vec<PathBuf>,
    /// Report TSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pairwise two-sided Wilcoxon p-values TSV.
    #[arg(long, value_name = "FILE")]
    pub pvalues: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Report TSV, one row per setting (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the run of the selected setting here.
    #[arg(long, value_name = "FILE")]
    pub selected_run: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,9,19,29,39,49")]
    pub delta_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,5,10,20,30")]
    pub k_grid: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.05,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95"
    )]
    pub lambda_grid: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    /// Classify a library error: illegal algorithms exit with 3, anything else with 1.
    pub fn from_error(e: Error) -> Self {
        let code = match e {
            Error::IllegalCombination { .. } => EXIT_ILLEGAL_ALGORITHM,
            _ => EXIT_FAILURE,
        };
        CliError::new(code, e.to_string())
    }

    /// For failures reading the corpus or index.
    pub fn bad_input(e: Error) -> Self {
        CliError::new(EXIT_BAD_INPUT, e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_error(e)
    }
}

/// Splice `key = value` lines of the `--config` file into the arguments,
/// right after the subcommand, skipping keys already given as flags.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| CliError::new(EXIT_FAILURE, "--config needs a file"))?,
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::new(EXIT_FAILURE, format!("config {path}: {e}")))?;
    let given = |key: &str| {
        let flag = format!("--{key}");
        args.iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::new(
                EXIT_FAILURE,
                format!("config {path} line {}: expected key=value", i + 1),
            )
        })?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" || given(&key) {
            continue;
        }
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => {
                extra.push(format!("--{key}"));
                extra.push(value.to_string());
            }
        }
    }
    let mut out = args;
    let insert_at = 2.min(out.len());
    out.splice(insert_at..insert_at, extra);
    Ok(out)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Run the CLI and return the process exit code.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = OsString>,
{
    let args: Vec<String> = args
        .into_iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = expand_config(args).and_then(|args| match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli),
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            Ok(())
        }
        Err(e) => Err(CliError::new(
            EXIT_BAD_INPUT,
            e.to_string().lines().next().unwrap_or("usage error"),
        )),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("clustrank: error: {}", one_line(&e.message));
            e.code
        }
    }
}

fn threads(common: &Common) -> Option<usize> {
    common.threads
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let threads = match &cli.command {
        Command::Index(a) => threads(&a.common),
        Command::Rank(a) => threads(&a.common),
        Command::Rerank(a) => threads(&a.common),
        Command::Eval(a) => threads(&a.common),
        Command::Sweep(a) => threads(&a.common),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::new(EXIT_FAILURE, "--threads must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::new(EXIT_FAILURE, format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Index(a) => commands::index(a),
        Command::Rank(a) => commands::rank(a),
        Command::Rerank(a) => commands::rerank(a),
        Command::Eval(a) => commands::eval(a),
        Command::Sweep(a) => commands::sweep(a),
    })
}

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ppt_core::Family;

const EXIT_OTHER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_DATA: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "ppt",
    version,
    about = "Formal-language corpora, recognizers, metamers and efficiency analysis"
)]
struct Cli {
    /// Pipeline config (TOML); `gen` builds every dataset it lists.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a packed corpus from a language spec, or every dataset in --config.
    Gen(GenArgs),
    /// Decide membership of strings read from stdin, or of a corpus's documents.
    Check(CheckArgs),
    /// Fit or sample n-gram metamer models.
    #[command(subcommand)]
    Metamer(MetamerCommand),
    /// Pack whitespace-separated token lines into fixed windows.
    Pack(PackArgs),
    /// Depth profile of a Dyck corpus.
    Stats(CorpusArg),
    /// Token, vocabulary, length and entropy summary of a corpus.
    Report(CorpusArg),
    /// Marginal rate of substitution and token efficiency from loss curves.
    Mrs(MrsArgs),
    /// Repeated-list retrieval passages as JSON lines.
    EvalGen(EvalGenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    #[value(alias = "dyck-nested", alias = "dyck")]
    Nested,
    #[value(alias = "dyck-shuffle")]
    Shuffle,
    Ww,
    #[value(alias = "random-uniform")]
    Random,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Nested => Family::DyckNested,
            FamilyArg::Shuffle => Family::DyckShuffle,
            FamilyArg::Ww => Family::Ww,
            FamilyArg::Random => Family::RandomUniform,
        }
    }
}

#[derive(Debug, Args)]
struct OutDir {
    /// Output directory.
    #[arg(short = 'o', long = "out", env = "PPT_OUT_DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Pair types for Dyck families; vocabulary size for ww and random.
    #[arg(short = 'k', long, default_value_t = 64)]
    k: u32,
    /// Token budget, rounded down to whole windows.
    #[arg(long, default_value_t = 30_000_000)]
    tokens: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    p_open: Option<f64>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long, default_value_t = ppt_core::corpus::DEFAULT_WINDOW)]
    window: usize,
    /// Base name of the output files; defaults to `<family>-k<k>`.
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Print accept/reject for this family; without it, print every verdict as JSON.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Pair types; inferred from bracket glyphs when omitted.
    #[arg(short = 'k', long)]
    k: Option<u32>,
    /// Check every document of a packed corpus instead of reading stdin.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum MetamerCommand {
    /// Fit an order-n model on a packed corpus.
    Fit(MetamerFitArgs),
    /// Sample a metamer corpus from a fitted model.
    Sample(MetamerSampleArgs),
}

#[derive(Debug, Args)]
struct MetamerFitArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Count n-grams across document boundaries instead of resetting context.
    #[arg(long)]
    continuous: bool,
    /// Model file to write.
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct MetamerSampleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    tokens: u64,
    #[arg(long, default_value_t = 2048)]
    doc_length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = ppt_core::corpus::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, default_value = "metamer")]
    name: String,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct PackArgs {
    /// One document per line; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    vocab_size: u32,
    #[arg(long, default_value_t = ppt_core::corpus::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "packed")]
    name: String,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct CorpusArg {
    #[arg(long)]
    corpus: PathBuf,
}

#[derive(Debug, Args)]
struct MrsArgs {
    #[arg(long)]
    baseline: PathBuf,
    #[arg(long)]
    run: PathBuf,
    /// Pre-pretraining steps of the run; overrides the curve header.
    #[arg(long)]
    ppt_steps: Option<f64>,
    /// Baseline step to evaluate at; defaults to the baseline's last step.
    #[arg(long)]
    eval_step: Option<f64>,
    /// Trailing median smoothing window before crossing detection.
    #[arg(long, num_args = 0..=1, default_missing_value = "5")]
    smooth: Option<usize>,
    /// Write label,step,loss rows for both curves to this file.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvalGenArgs {
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 5)]
    list_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSONL file to write; stdout when omitted.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use ppt_core::Error as E;
    for cause in err.chain() {
        if cause.is::<commands::UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Config(_) => EXIT_CONFIG,
                E::InvalidSpec(_) | E::BadOrder(_) => EXIT_USAGE,
                E::Io { .. } => EXIT_IO,
                _ => EXIT_DATA,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_OTHER
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
}

/// The error chain joined by `: `, skipping causes already quoted by the
/// message before them.
fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

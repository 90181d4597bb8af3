//! The `smlg` command line: matching engines, corpus generation, the
//! cross-checking verifier and the gate-count benchmark.
//!
//! Exit codes: 0 success, 1 usage error, 2 file or parse error,
//! 3 verification failure.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use smlg_core::grover::KRange;
use smlg_core::qgraph::PadMode;
use smlg_core::Error;

mod bench;
mod corpus;
mod matching;
mod report;

pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "smlg",
    version,
    about = "Exact string matching on text and level DAGs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Match a pattern in a text.
    MatchText(MatchTextArgs),
    /// Match a pattern in a level DAG.
    MatchDag(MatchDagArgs),
    /// Write a seeded corpus of graphs and patterns.
    Gen(GenArgs),
    /// Run every engine and invariant check on a corpus.
    Verify(VerifyArgs),
    /// Gate counts over doubling graph sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextEngine {
    Naive,
    ShiftAnd,
    QuantumSim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DagEngine {
    Dp,
    ShiftAnd,
    QuantumSim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PadArg {
    Substates,
    Classical,
}

impl From<PadArg> for PadMode {
    fn from(p: PadArg) -> PadMode {
        match p {
            PadArg::Substates => PadMode::Substates,
            PadArg::Classical => PadMode::Classical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KRangeArg {
    /// Uniform on [0, ceil(lambda_1)].
    Period,
    /// Uniform on [0, |P|].
    Pattern,
}

impl KRangeArg {
    pub fn resolve(self, pattern_len: usize) -> KRange {
        match self {
            KRangeArg::Period => KRange::Period,
            KRangeArg::Pattern => KRange::Pattern(pattern_len as u64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ReportFormat {
    #[default]
    Human,
    Json,
}

/// Flags shared by every command that draws random numbers.
#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    /// Base seed; defaults to $SMLG_SEED, then 0.
    #[arg(long, env = "SMLG_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Repetition budget of the amplitude-amplification stage.
    #[arg(long, default_value_t = 10)]
    pub c: u32,
    /// Range of the random iteration count.
    #[arg(long, value_enum, default_value_t = KRangeArg::Period)]
    pub k_range: KRangeArg,
    /// Double the search space with an extra, never-marked index qubit.
    #[arg(long)]
    pub double: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format of the report.
    #[arg(long, value_enum, default_value_t = ReportFormat::Human)]
    pub report: ReportFormat,
    /// Include wall-clock times (reports are then no longer reproducible byte for byte).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MatchTextArgs {
    /// Text file of labels: printable characters, whitespace ignored, `int:<k>` for integers.
    #[arg(long)]
    pub text: PathBuf,
    /// Pattern file, same syntax as --text.
    #[arg(long)]
    pub pattern: PathBuf,
    /// Matching engine.
    #[arg(long, value_enum)]
    pub engine: TextEngine,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Check the prefix property after every iteration.
    #[arg(long)]
    pub check_invariants: bool,
    /// Print every simulated operation to standard error.
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MatchDagArgs {
    /// Graph in the `.ldag` format.
    #[arg(long)]
    pub graph: PathBuf,
    /// Pattern file of labels: printable characters, whitespace ignored, `int:<k>` for integers.
    #[arg(long)]
    pub pattern: PathBuf,
    /// Matching engine.
    #[arg(long, value_enum)]
    pub engine: DagEngine,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Handling of pattern lengths that are not powers of two.
    #[arg(long, value_enum, default_value_t = PadArg::Substates)]
    pub pad: PadArg,
    /// Check the node and level invariants during the run.
    #[arg(long)]
    pub check_invariants: bool,
    /// Print every simulated operation, and the invariant summaries, to standard error.
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of instances.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Fixed node count; without it sizes are drawn per instance.
    #[arg(long, requires = "levels")]
    pub nodes: Option<usize>,
    /// Fixed level count; requires --nodes.
    #[arg(long, requires = "nodes")]
    pub levels: Option<usize>,
    /// Probability of each extra edge from the previous level.
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    /// Alphabet size (largest alphabet when sizes are drawn).
    #[arg(long, default_value_t = 4)]
    pub alphabet: usize,
    /// Largest pattern length (exact length when --nodes is given).
    #[arg(long, default_value_t = 8)]
    pub pattern_len: usize,
    /// Largest node count of drawn sizes.
    #[arg(long, default_value_t = 24)]
    pub max_nodes: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Directory written by `smlg gen`.
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Where minimized failing instances go; defaults to <corpus>/failures.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Smallest edge count exponent.
    #[arg(long, default_value_t = 8)]
    pub min_exp: u32,
    /// Largest edge count exponent.
    #[arg(long, default_value_t = 14)]
    pub max_exp: u32,
    /// Length of the never-occurring bench pattern.
    #[arg(long, default_value_t = 4)]
    pub pattern_len: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, default_value_t = 10)]
    pub c: u32,
    /// Also measure the search stage for these pattern lengths at |E| = 2^10.
    #[arg(long, value_delimiter = ',')]
    pub grover_lengths: Vec<usize>,
    /// Seeds averaged per pattern length in the search-stage table.
    #[arg(long, default_value_t = 1000)]
    pub grover_trials: u64,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_IO,
            msg: msg.into(),
        }
    }

    pub fn verify(msg: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_VERIFY,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::Usage(_) | Error::Generation(_) => EXIT_USAGE,
            Error::Parse { .. } | Error::NotADag | Error::NotLevelDag(_) => EXIT_IO,
            Error::ScratchNotClean(_) | Error::StateCorruption(_) => EXIT_VERIFY,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn read_file(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub(crate) fn thread_pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

/// Parses `args` (program name first) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::MatchText(a) => matching::match_text(a, out, err),
        Command::MatchDag(a) => matching::match_dag(a, out, err),
        Command::Gen(a) => corpus::gen(a, out),
        Command::Verify(a) => corpus::verify(a, out),
        Command::Bench(a) => bench::bench(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code
        }
    }
}

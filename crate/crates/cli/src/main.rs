//! `slk` — scaling-law analysis from the command line.

mod artifact;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "slk",
    version,
    about = "Fit scaling laws to training runs, quantify cross-language synergy, \
             and allocate token budgets under fixed compute",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupByArg {
    /// One fit per language tag.
    Language,
    /// One fit per translation direction.
    Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    /// Single-language training curves.
    Chinchilla,
    /// Translation-direction curves.
    Translation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TauArg {
    /// Transfer coefficients from baseline-normalized gains.
    Relative,
    /// Transfer coefficients from absolute loss deltas.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridArg {
    /// The built-in 10-size x 6-budget reference grid.
    Paper,
    /// Unit-free grid from --sizes and --budgets.
    Custom,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Training observations (CSV or JSON Lines).
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// How rows are grouped into fits.
    #[arg(long, value_enum)]
    group_by: GroupByArg,
    /// Fitting preset for the grouped curves.
    #[arg(long, value_enum)]
    preset: PresetArg,
    /// Output fits artifact (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Fits artifact produced by `fit` or `fixtures export`.
    #[arg(long)]
    fits: PathBuf,
    /// Model parameter count.
    #[arg(long)]
    n: f64,
    /// Training token count.
    #[arg(long)]
    d: f64,
    /// Tag key to evaluate; optional when the artifact holds exactly one.
    #[arg(long)]
    tag: Option<String>,
}

#[derive(Debug, Args)]
struct SynergyArgs {
    /// Paired mixed-training results (target, auxiliary, mixed_loss, baseline_loss).
    #[arg(long)]
    pairs: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output synergy matrix artifact (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Which deltas back the transfer coefficients.
    #[arg(long, value_enum, default_value = "relative")]
    tau: TauArg,
}

#[derive(Debug, Args)]
struct AllocateArgs {
    /// Fits artifact with one entry per language.
    #[arg(long)]
    fits: PathBuf,
    /// Synergy matrix artifact supplying transfer coefficients.
    #[arg(long)]
    tau: PathBuf,
    /// Synergy strength multiplier (>= 0).
    #[arg(long)]
    gamma: f64,
    /// Model parameter count the mixture will train.
    #[arg(long)]
    n: f64,
    /// Total token budget to split across languages.
    #[arg(long)]
    tokens: f64,
    /// Minimum proportion per language.
    #[arg(long)]
    floor: Option<f64>,
    /// Optimizer seed; defaults to SLK_SEED or 42.
    #[arg(long)]
    seed: Option<u64>,
    /// Output allocation plan artifact (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FrontierArgs {
    /// Fits artifact holding the law to optimize.
    #[arg(long)]
    fits: PathBuf,
    /// Tag key to evaluate; optional when the artifact holds exactly one.
    #[arg(long)]
    tag: Option<String>,
    /// Total compute budget in FLOPs.
    #[arg(long)]
    compute: f64,
    /// FLOPs per parameter per token.
    #[arg(long, default_value_t = 6.0)]
    flops_factor: f64,
}

#[derive(Debug, Args)]
struct WhatifArgs {
    /// Allocation plan artifact to re-evaluate.
    #[arg(long)]
    plan: PathBuf,
    /// Proportion overrides, e.g. `python=0.4,go=0.1`; the remaining
    /// languages are rescaled to keep the total at 1.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Law parameters: inline JSON (starts with '{') or a path to JSON.
    #[arg(long)]
    params: String,
    /// Evaluation grid.
    #[arg(long, value_enum)]
    grid: GridArg,
    /// Comma-separated model sizes (required with --grid custom).
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated token budgets (required with --grid custom).
    #[arg(long)]
    budgets: Option<String>,
    /// Log-normal noise scale; 0 emits the exact law.
    #[arg(long)]
    noise: f64,
    /// Noise seed; defaults to SLK_SEED or 42.
    #[arg(long)]
    seed: Option<u64>,
    /// Language tag attached to the generated rows.
    #[arg(long, default_value = "synthetic")]
    tag: String,
    /// Output dataset; format inferred from the extension (default CSV).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Fits artifact to summarize.
    #[arg(long)]
    fits: PathBuf,
    /// Add a ranking of languages by fitted irreducible loss.
    #[arg(long)]
    rank_linf: bool,
    /// Output Markdown file; data series and charts are written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum FixturesCommand {
    /// List the bundled reference constants.
    List,
    /// Print one fixture as JSON.
    Show {
        #[arg(long)]
        name: String,
    },
    /// Export a fixture: laws become fits artifacts (JSON), mixed-training
    /// grids and pair losses become paired-run datasets (CSV).
    Export {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit two-term power laws to grouped training observations.
    Fit(FitArgs),
    /// Evaluate a fitted law at a model size and token count.
    Predict(PredictArgs),
    /// Build a synergy matrix from paired mixed-training results.
    Synergy(SynergyArgs),
    /// Optimize token proportions across languages under a fixed budget.
    Allocate(AllocateArgs),
    /// Split a compute budget optimally between model size and tokens.
    Frontier(FrontierArgs),
    /// Re-evaluate an allocation plan with edited proportions.
    Whatif(WhatifArgs),
    /// Generate a synthetic training surface from law parameters.
    Synth(SynthArgs),
    /// Render a Markdown report with data series and SVG charts.
    Report(ReportArgs),
    /// Inspect or export the bundled published constants.
    Fixtures {
        #[command(subcommand)]
        command: FixturesCommand,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Predict(args) => commands::predict(args),
        Command::Synergy(args) => commands::synergy(args),
        Command::Allocate(args) => commands::allocate(args),
        Command::Frontier(args) => commands::frontier(args),
        Command::Whatif(args) => commands::whatif(args),
        Command::Synth(args) => commands::synth(args),
        Command::Report(args) => commands::report(args),
        Command::Fixtures { command } => commands::fixtures(command),
    }
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes (`slk fixtures list | head`)
    // instead of panicking on the failed write
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // keep exit 2 reserved for analysis outcomes: usage errors are 1,
            // --help/--version are 0
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let analysis_outcome = err
                .chain()
                .filter_map(|cause| cause.downcast_ref::<slk_core::Error>())
                .any(|e| !e.is_input_error());
            ExitCode::from(if analysis_outcome { 2 } else { 1 })
        }
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "revol",
    version,
    about = "Recurrence-interval analysis of extreme price volatility"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every stage on the inputs and write the report and tables.
    Analyze {
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit the truncated stretched exponential at each threshold.
    Fit(StageArgs),
    /// Bootstrap goodness-of-fit p-values (fits first unless --report is given).
    Gof(StageArgs),
    /// Empirical and model hazard curves.
    Hazard(StageArgs),
    /// Conditional statistics, DFA and DMA of the intervals.
    Memory(StageArgs),
    /// Write shuffled volatility series without analyzing them.
    Surrogate {
        #[command(flatten)]
        input: InputArgs,
        /// Base seed.
        #[arg(long, env = "REVOL_SEED", default_value_t = 0)]
        seed: u64,
        /// Surrogates per input.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(short, long, default_value = "revol-out")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct StageArgs {
    /// Report from an earlier run; the stage is recomputed on its intervals.
    #[arg(long, conflicts_with_all = ["config", "inputs", "thresholds"])]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Price CSV as PATH or PATH:LABEL; repeatable.
    #[arg(short = 'i', long = "input", value_name = "PATH[:LABEL]")]
    pub inputs: Vec<String>,
    /// Date column name.
    #[arg(long, default_value = "date")]
    pub date_col: String,
    /// Price column name.
    #[arg(long, default_value = "price")]
    pub price_col: String,
    /// Dates are M/D/YYYY instead of ISO.
    #[arg(long)]
    pub us_dates: bool,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    /// TOML file with analysis settings; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    /// Thresholds q in units of the volatility standard deviation.
    #[arg(long, value_delimiter = ',', value_name = "Q,...")]
    pub thresholds: Option<Vec<f64>>,
    /// Hazard windows in days.
    #[arg(long, value_delimiter = ',', value_name = "DT,...")]
    pub dts: Option<Vec<u32>>,
    /// Bootstrap replicates.
    #[arg(long)]
    pub n_boot: Option<usize>,
    #[arg(long, env = "REVOL_SEED")]
    pub seed: Option<u64>,
    /// Shuffled surrogates analyzed per input.
    #[arg(long)]
    pub n_surrogates: Option<usize>,
    /// Largest cutoff tried when selecting tau_min.
    #[arg(long)]
    pub tau_min_max: Option<u32>,
    /// DMA window positions (0 backward, 0.5 centered, 1 forward).
    #[arg(long = "theta", value_delimiter = ',', value_name = "THETA,...")]
    pub thetas: Option<Vec<f64>>,
    /// Detrending polynomial order for DFA.
    #[arg(long)]
    pub dfa_order: Option<usize>,
    /// Number of box sizes in the fluctuation grid.
    #[arg(long)]
    pub box_points: Option<usize>,
    /// Significance level of the two-sample tests.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fit with the integer-supported likelihood.
    #[arg(long)]
    pub discrete: bool,
    /// Refit every bootstrap replicate.
    #[arg(long)]
    pub refit: bool,
    /// Minimum intervals at risk for a confident hazard point.
    #[arg(long)]
    pub risk_floor: Option<usize>,
    /// Single-threaded execution.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(short, long, default_value = "revol-out")]
    pub out: PathBuf,
    /// Also write the interval series of every threshold.
    #[arg(long)]
    pub intervals: bool,
}

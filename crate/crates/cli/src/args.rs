use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "trirec", version, about = "Series defined by three-term recurrences: classification, evaluation and boundary diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output: OutputFormat,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    ByB,
    ByA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    A,
    B,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a family and report its disc of convergence.
    Classify {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Evaluate the series at a point inside the disc.
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// Indicial exponent lambda (complex allowed, e.g. "1/2+i").
        #[arg(long, default_value = "0")]
        lambda: String,
    },
    /// Build the confluent Heun family; evaluate it when --x is given.
    Heun {
        #[command(flatten)]
        params: HeunArgs,
        /// Point of evaluation.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        m_max: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Partial sums of |d_n| |x|^n on (or inside) the boundary circle.
    ScanBoundary {
        #[command(flatten)]
        family: FamilyArgs,
        /// Which circle: |A x| = 1 or |B x^2| = 1. Defaults to the family's shape.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        /// Comma-separated, strictly increasing truncation orders M.
        #[arg(long, default_value = "1000,10000,100000")]
        checkpoints: String,
        /// Scan at this fraction of the radius instead of on the circle.
        #[arg(long)]
        interior: Option<f64>,
    },
    /// Check the regrouped majorant series against the modulus recurrence.
    DecomposeCheck {
        #[command(flatten)]
        family: FamilyArgs,
        /// Start index N of the majorant sequences.
        #[arg(long, default_value_t = 10)]
        n_start: u64,
        /// Highest degree M compared.
        #[arg(long, default_value_t = 12)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Group::ByB)]
        group: Group,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Also sum both sides at this nonnegative rational |x|.
        #[arg(long)]
        x: Option<String>,
        /// Largest sub-series index kept.
        #[arg(long)]
        tau_max: Option<usize>,
    },
    /// Search for inequality parameters and evaluate the harmonic lower bound.
    Witness {
        #[command(flatten)]
        family: FamilyArgs,
        /// Error bound eps in (0, 1), rational.
        #[arg(long, default_value = "1/1000")]
        eps: String,
        #[arg(long, default_value_t = 100_000)]
        scan_limit: u64,
        /// Absorption constant K in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        k: f64,
        /// Number of levels p kept in the lower bound.
        #[arg(long, default_value_t = 10)]
        p_max: u64,
        /// Comma-separated truncation orders M for the lower bound (default 2m,4m,8m,16m).
        #[arg(long)]
        upper: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// JSON file with a_num, a_den, b_num, b_den coefficient lists.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// The same document inline.
    #[arg(long)]
    pub family_json: Option<String>,
    /// Use the confluent Heun family built from --alpha .. --q.
    #[arg(long)]
    pub heun: bool,
    #[command(flatten)]
    pub params: HeunArgs,
}

#[derive(Debug, Args)]
pub struct HeunArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Indicial root: 0 or 1-gamma.
    #[arg(long, default_value = "0")]
    pub lambda_root: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Point of evaluation (rational or decimal, complex allowed).
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub m_max: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
}

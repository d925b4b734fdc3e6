//! Argument definitions.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "glasner",
    version,
    about = "Exponential sums, power-full moduli and dense dilations on the rational torus"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format; csv is available for tabular commands.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Seed for random modes.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads for parallel commands (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
    /// Report timing_ms as 0 so that output is byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Elementary-term budget for composite evaluations.
    #[arg(long, env = "GLASNER_BUDGET", global = true)]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complete exponential sums S_{e,q}(f).
    Expsum {
        #[command(subcommand)]
        command: ExpsumCommand,
    },
    /// Power-structure decomposition of a modulus.
    Modulus {
        #[command(subcommand)]
        command: ModulusCommand,
    },
    /// Power-full integers.
    Powerfull {
        #[command(subcommand)]
        command: PowerfullCommand,
    },
    /// Density of rational point sets on the torus.
    Torus {
        #[command(subcommand)]
        command: TorusCommand,
    },
    /// Polynomial matrix dilations of point sets.
    Glasner {
        #[command(subcommand)]
        command: GlasnerCommand,
    },
    /// Closed-form cardinality bounds.
    Bounds {
        #[command(subcommand)]
        command: BoundsCommand,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Direct,
    Crt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum ExpsumCommand {
    /// Evaluate one sum and its envelopes.
    Eval {
        /// Degree e.
        #[arg(long)]
        e: u32,
        /// Modulus q.
        #[arg(long)]
        q: u64,
        /// Coefficients f_1,…,f_e (comma separated).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        f: Vec<i128>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Largest |S| over q-primitive coefficient vectors.
    Extremal {
        #[arg(long)]
        e: u32,
        /// Modulus, or first modulus of a sweep.
        #[arg(long)]
        q: u64,
        /// Last modulus of a sweep q, q+1, …, q_max.
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Primitive samples per modulus in random mode.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModulusCommand {
    /// Split q into q_2, …, q_e by prime exponent.
    Decompose {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        e: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum PowerfullCommand {
    /// All nu-full integers in [lo, hi].
    List {
        #[arg(long)]
        nu: u32,
        #[arg(long, default_value_t = 1)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Number of nu-full integers in [1, x].
    Count {
        #[arg(long)]
        nu: u32,
        #[arg(long)]
        x: u64,
    },
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Distance threshold, as p/q or a decimal.
    #[arg(long)]
    pub eps: String,
    /// Initial probe spacing for d >= 2 [default: min(0.05, eps/2)].
    #[arg(long)]
    pub mesh: Option<f64>,
    /// Mesh halvings allowed while the verdict is undecided.
    #[arg(long, default_value_t = 6)]
    pub rounds: u32,
}

#[derive(Debug, Subcommand)]
pub enum TorusCommand {
    /// Certify whether a point set is eps-dense.
    Density {
        /// Point set file.
        #[arg(long)]
        set: String,
        #[command(flatten)]
        density: DensityArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    FirstPair,
    MaxOverPairs,
}

#[derive(Debug, Subcommand)]
pub enum GlasnerCommand {
    /// First n <= n_max with A(n)X eps-dense.
    Search {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        n_max: u64,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Pair-denominator histogram h_q.
    Hq {
        #[arg(long)]
        set: String,
    },
    /// Both sides of the bad-set inequality with implied constant 1.
    Functional {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value_t = Strategy::FirstPair)]
        strategy: Strategy,
    },
    /// Look for u, v in a box with u^t A(X) v identically zero.
    CheckMatrix {
        #[arg(long)]
        matrix: String,
        #[arg(long = "box", default_value_t = 8)]
        box_bound: u64,
    },
}

#[derive(Debug, Args)]
pub struct BoundParams {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub e: u64,
    /// Height H of the matrix.
    #[arg(long = "H")]
    pub height: u64,
    #[arg(long)]
    pub eps: String,
    /// Constant C in R = C H eps^(-2de-1).
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Earlier and improved bounds on k, and the splitting point R.
    K {
        #[command(flatten)]
        params: BoundParams,
    },
    /// Envelopes of the small- and large-modulus contributions.
    Pipeline {
        #[command(flatten)]
        params: BoundParams,
        /// Set size k.
        #[arg(long)]
        k: u64,
        /// Splitting point [default: C H eps^(-2de-1)].
        #[arg(long = "R")]
        r: Option<f64>,
    },
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "heterovar",
    version,
    about = "Variance function estimation in heteroscedastic nonparametric regression",
    long_about = None
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate V(x) from an `x,y` CSV file.
    Estimate(EstimateArgs),
    /// Select a bandwidth by K-fold cross-validation.
    Cv(CvArgs),
    /// Run the CDMSE comparison of both estimators.
    Simulate(SimulateArgs),
    /// Empirical convergence rate of the difference-based estimator.
    Rates(RatesArgs),
    /// Numerical companions to the minimax lower bound.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Dump kernel coefficients or bin weights.
    Kernel(KernelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Difference-based estimator with boundary kernels.
    Diff,
    /// Residual-based local linear estimator.
    Fanyao,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV with header `x,y`.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output CSV (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Diff)]
    pub method: MethodArg,
    /// Bandwidth of the difference-based estimator; cross-validated when omitted.
    #[arg(long)]
    pub h: Option<f64>,
    /// Kernel order of the difference-based estimator.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Evaluation grid: a point count N (i/(N-1), i = 0..N-1) or a CSV file with header `x`.
    /// Defaults to the design points.
    #[arg(long)]
    pub grid: Option<String>,
    /// Clip negative estimates at zero.
    #[arg(long)]
    pub truncate: bool,
    /// Mean bandwidth for `--method fanyao`.
    #[arg(long)]
    pub h_mean: Option<f64>,
    /// Variance bandwidth for `--method fanyao`.
    #[arg(long)]
    pub h_var: Option<f64>,
    /// Folds used when a bandwidth has to be cross-validated.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Fold seed used when a bandwidth has to be cross-validated.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Diff)]
    pub method: MethodArg,
    /// Number of folds.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Log-spaced candidates `lo:hi:count` (default: 20 points around n^{-1/5}).
    #[arg(long)]
    pub h_grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// n = 1000, 100 replications, 10-fold CV, means f1-f4, v-quadratic.
    Table1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignArg {
    Fixed,
    RandomUniform,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Base configuration; flags and `--config` override it.
    #[arg(long, value_enum, default_value_t = Preset::Table1)]
    pub preset: Preset,
    /// JSON file overriding preset fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// 30 replications instead of 100.
    #[arg(long, conflicts_with = "replications")]
    pub fast: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Comma-separated mean ids (f1,f2,f3,f4).
    #[arg(long, value_delimiter = ',')]
    pub means: Option<Vec<String>>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    #[arg(long, value_enum)]
    pub design: Option<DesignArg>,
    /// Number of CV folds.
    #[arg(long)]
    pub k: Option<usize>,
    /// Summary JSON path (default: stdout).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Per-replication CSV path.
    #[arg(long)]
    pub per_replication: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000,4000")]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bandwidth rule h = n^e.
    #[arg(long, default_value_t = -0.2, allow_hyphen_values = true)]
    pub h_exponent: f64,
    #[arg(long, default_value = "f1")]
    pub mean: String,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Emit the full study (points and fitted slope) as JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum TheoryCommand {
    /// Nodes and weights of the moment-matched distribution; CSV `node,weight`.
    Moments {
        #[arg(long)]
        q: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Hellinger affinities along theta = (M_f/2B) n^{-alpha}.
    Hellinger {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        q: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        m_f: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Evaluate the odd-integrand integral for several d; CSV `d,value,expectation_form`.
    HcCheck {
        #[arg(long, value_delimiter = ',', required = true)]
        d_list: Vec<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// One realization of the rough mean at the design points; CSV `i,x,r,f`.
    Adversarial {
        #[arg(long)]
        alpha: f64,
        /// Defaults to the smallest odd q with (q + 1) alpha > 1.
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        m_f: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Rate of the pointwise error under the rough mean, with a smooth control; JSON.
    LowerBound {
        #[arg(long, value_delimiter = ',', default_value = "0.15")]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000,8000")]
        ns: Vec<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 10.0)]
        m_f: f64,
        #[arg(long, default_value_t = 4000)]
        replications: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the f = 0 control run.
        #[arg(long)]
        no_control: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long)]
    pub h: f64,
    /// Evaluation point.
    #[arg(long)]
    pub x: f64,
    /// Sample size of the fixed design.
    #[arg(long)]
    pub n: usize,
    /// Print the coefficients of the kernel used at `x` (CSV `k,coefficient`)
    /// instead of the weights (CSV `i,weight`).
    #[arg(long)]
    pub coefficients: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

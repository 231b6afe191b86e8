use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fastescape_core::acceptance::{DEFAULT_SEED, ORACLE_SAMPLES};
use fastescape_core::construction::DEFAULT_N_MAX;
use serde::Serialize;

const EXIT_CODES: &str = "\
Exit codes:
  0  holds on the window (or nothing to decide)
  1  fails, or a hypothesis of the requested check is unmet
  2  inconclusive (0 with --allow-inconclusive)
  3  usage, parse or domain error";

#[derive(Parser, Serialize, Debug)]
#[command(
    name = "fastescape",
    version,
    about = "Growth-regularity checks, example constructions and escape-speed classification",
    after_help = EXIT_CODES,
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Serialize, Debug)]
pub struct Global {
    /// TOML file of flag values for the chosen subcommand; flags on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Exit 0 instead of 2 when the verdict is inconclusive.
    #[arg(long, global = true)]
    pub allow_inconclusive: bool,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,

    /// Also write the main table as CSV.
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate growth models and their iterates.
    #[command(subcommand)]
    Growth(GrowthCmd),
    /// Grid checks of the regularity conditions.
    #[command(subcommand)]
    Regularity(RegularityCmd),
    /// Build and audit the two example profiles.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Compare an orbit against M and mu thresholds at finite depth.
    Classify(ClassifyArgs),
    /// Run the acceptance suite against the high-precision reference.
    Selftest(SelftestArgs),
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthCmd {
    /// psi(t), M(e^t) and optionally mu_{m,eps}(e^t) at the given t.
    Eval(EvalArgs),
    /// Finite-window order and lower order from ln psi(t) / t.
    Order(OrderArgs),
    /// Least grid radius R from which M (or mu) increases.
    FindR(FindRArgs),
}

#[derive(Args, Serialize, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: String,
    /// Values of t = ln r, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Also evaluate mu_{m,eps}.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Serialize, Debug)]
pub struct OrderArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub t_lo: f64,
    #[arg(long)]
    pub t_hi: f64,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Upper exponent p of exp(r^q) <= M(r) <= exp(r^p); checked with --q.
    #[arg(long, requires = "q")]
    pub p: Option<f64>,
    #[arg(long, requires = "p")]
    pub q: Option<f64>,
}

#[derive(Args, Serialize, Debug)]
pub struct FindRArgs {
    #[arg(long)]
    pub model: String,
    /// Use mu_{m,eps} instead of M.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Search grid in t = ln r.
    #[arg(long, default_value_t = 0.5)]
    pub t_lo: f64,
    #[arg(long, default_value_t = 50.0)]
    pub t_hi: f64,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Iterates listed from R.
    #[arg(long, default_value_t = 5)]
    pub iterates: usize,
}

#[derive(Args, Serialize, Debug, Clone, Copy)]
pub struct ScanArgs {
    #[arg(long)]
    pub t_lo: f64,
    #[arg(long)]
    pub t_hi: f64,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Relative mantissa tolerance for ties.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Check lhs > rhs; ties become inconclusive.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityCmd {
    /// psi(kt) >= (k psi(t))^{1/eps}.
    Strong {
        #[arg(long)]
        model: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        k: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// psi(kt) >= k d psi(t).
    Log {
        #[arg(long)]
        model: String,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// mu_{m,eps}(r^k) >= M(r)^k.
    General {
        #[arg(long)]
        model: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        k: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// A psi(t) <= psi(t + ln C) <= B psi(t).
    Doubling {
        #[arg(long)]
        model: String,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Strong log-regularity of outer . inner at (eps', k^{3/2}).
    Compose {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
        #[arg(long)]
        eps_prime: f64,
        /// Outer witness k; searched on the default k-grid when absent.
        #[arg(long)]
        outer_k: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        outer_t_lo: f64,
        #[arg(long, default_value_t = 50.0)]
        outer_t_hi: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// mu_{2,eps}^n(r0^k) >= (M^n(r0))^k >= M^n(r0) for n = 1..=n_max.
    Chain {
        #[arg(long)]
        model: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        k: f64,
        /// Starting radius, as E^level(mantissa) or a real.
        #[arg(long)]
        r0: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
}

#[derive(Args, Serialize, Debug, Clone, Copy)]
pub struct PhiArgs {
    #[arg(long, default_value_t = 0.5)]
    pub eps_tilde: f64,
    #[arg(long, default_value_t = 5.0)]
    pub k_tilde: f64,
    #[arg(long, default_value_t = 4.0)]
    pub t0: f64,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: usize,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructCmd {
    /// Convex piecewise-linear profile with alternating ratio limits.
    Example1(PhiArgs),
    /// Separation of mu_{2,eps} and M iterates for psi(t) = t^2.
    Example2 {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// The growth inequality of the example1 profile at a smaller eps.
    ExtendEps {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Args, Serialize, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: String,
    /// `real:LAMBDA,X0` for the orbit of lambda e^x, or `synthetic:FILE` for
    /// a CSV with `level,mantissa` columns.
    #[arg(long)]
    pub orbit: String,
    /// Orbit depth; required for real orbits, truncates synthetic ones.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub max_lag: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75, 0.9])]
    pub eps: Vec<f64>,
    /// Threshold radius R, as E^level(mantissa) or a real.
    #[arg(long, default_value = "E^1(1)")]
    pub r: String,
    /// Level of the mu family used for the Q_m comparison.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
}

#[derive(Args, Serialize, Debug)]
pub struct SelftestArgs {
    /// Random samples for the kernel-vs-reference criterion.
    #[arg(long, default_value_t = ORACLE_SAMPLES)]
    pub samples: usize,
}
